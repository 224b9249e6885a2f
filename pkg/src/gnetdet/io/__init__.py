from gnetdet.io.formats import (
    VOC_CLASSES,
    format_detections,
    format_ground_truth,
    parse_detection,
    parse_ground_truth,
    read_detections,
    read_ground_truth,
    voc_xml_to_ground_truth,
)
from gnetdet.io.image import (
    ChannelMode,
    Image,
    draw_boxes,
    extract_y,
    load_image,
    preprocess,
    rgb_to_yuv,
    save_image,
)

__all__ = [
    "VOC_CLASSES", "format_detections", "format_ground_truth", "parse_detection", "parse_ground_truth",
    "read_detections", "read_ground_truth", "voc_xml_to_ground_truth",
    "ChannelMode", "Image", "draw_boxes", "extract_y", "load_image", "preprocess", "rgb_to_yuv", "save_image",
]
