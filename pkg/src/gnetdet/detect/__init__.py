from gnetdet.detect.boxes import BoundingBox, iou, nms, sort_key
from gnetdet.detect.decode import DecodeConfig, decode, encode


def postprocess(output, image_w, image_h, cfg=DecodeConfig()):
    """decode followed by NMS: the whole host-side stage."""
    return nms(decode(output, image_w, image_h, cfg), cfg.nms_iou_threshold)


__all__ = ["BoundingBox", "DecodeConfig", "decode", "encode", "iou", "nms", "postprocess", "sort_key"]
