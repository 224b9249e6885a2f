"""``gnetdet`` command-line entry point.

Exit codes: 0 success, 1 usage error (including refusing to overwrite an
existing output without ``--force``), 2 model validation or capacity
failure, 3 data or file-format error, 4 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from gnetdet import __version__, bench
from gnetdet.classify import decode_v1, decode_v2, format_top_k
from gnetdet.detect import DecodeConfig, decode, nms
from gnetdet.errors import CapacityError, FormatError, ShapeError, SpecError
from gnetdet.evaluation import evaluate
from gnetdet.io import formats
from gnetdet.io.image import Image, draw_boxes, load_image, preprocess, save_image
from gnetdet.model import (
    BUILDERS,
    ClassifyV1,
    ClassifyV2,
    Detection,
    WeightStore,
    forward,
    load_spec,
    load_weights,
    save_spec,
    spec_to_text,
    validate,
    weights_to_bytes,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_DATA, EXIT_INTERNAL = range(5)

log = logging.getLogger("gnetdet")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _guard_output(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise UsageError(f"{path} exists; pass --force to overwrite")


def _write_text(path: Path, text: str, force: bool) -> None:
    _guard_output(path, force)
    path.write_text(text)


def _load_model(config, weights):
    spec = load_spec(config)
    report = validate(spec)
    if not report.ok:
        raise SpecError(f"{config}: model spec is invalid:\n{report}")
    return spec, load_weights(spec, weights)


def _names(args, num_classes=None):
    if getattr(args, "names", None):
        return formats.load_names(args.names)
    if num_classes is None or num_classes == len(formats.VOC_CLASSES):
        return formats.VOC_CLASSES
    return None


def _image_paths(path: Path):
    if path.is_dir():
        found = sorted(p for p in path.iterdir() if p.suffix.lower() in (".ppm", ".pgm", ".pnm"))
        if not found:
            raise FormatError(f"no .ppm/.pgm images in {path}")
        return found
    if not path.exists():
        raise FormatError(f"{path} does not exist")
    return [path]


def cmd_validate(args) -> int:
    spec = load_spec(args.config)
    report = validate(spec)
    print(f"{spec.name}: {report}")
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_init(args) -> int:
    channels = 1 if args.mode == "y" else 3
    common = dict(input_size=args.size, input_channels=channels, color_mode=args.mode,
                  head_relu=args.head_relu, max_channels=args.max_channels)
    if args.arch in ("gnetdet-large", "gnetdet-small"):
        spec = BUILDERS[args.arch](num_classes=args.classes, **common)
    elif args.arch == "gnetfc-v1":
        spec = BUILDERS[args.arch](args.classes, **common)
    else:
        spec = BUILDERS[args.arch](args.classes, args.grid, args.channels, **common)
    report = validate(spec)
    if not report.ok:
        print(report, file=sys.stderr)
        return EXIT_INVALID
    cfg_path, w_path = Path(args.config), Path(args.weights)
    _guard_output(cfg_path, args.force)
    _guard_output(w_path, args.force)
    payload = weights_to_bytes(spec, WeightStore.random(spec, args.seed))
    cfg_path.write_text(spec_to_text(spec))
    w_path.write_bytes(payload)
    print(f"wrote {cfg_path} and {w_path} ({spec.num_sublayers} sublayers)")
    return EXIT_OK


def _decode_cfg(args) -> DecodeConfig:
    try:
        return DecodeConfig(args.conf_threshold, args.score_threshold, args.nms_threshold)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_detect(args) -> int:
    spec, weights = _load_model(args.config, args.weights)
    if not isinstance(spec.head, Detection):
        raise SpecError(f"{args.config} is not a detection model")
    cfg = _decode_cfg(args)
    names = _names(args, spec.head.num_classes)
    src = Path(args.image)
    paths = _image_paths(src)
    batch = src.is_dir()
    if batch and (args.out is None):
        raise UsageError("detecting a directory needs --out DIR")
    out = Path(args.out) if args.out else None
    render = Path(args.render) if args.render else None
    if batch:
        for d in (out, render):
            if d is not None:
                d.mkdir(parents=True, exist_ok=True)

    for path in paths:
        img = load_image(path)
        x = preprocess(img, spec.input_size, spec.color_mode, spec.input_scale)
        boxes = nms(decode(forward(spec, weights, x), img.width, img.height, cfg), cfg.nms_iou_threshold)
        text = formats.format_detections(boxes, names)
        if out is None:
            sys.stdout.write(text)
        else:
            _write_text(out / f"{path.stem}.txt" if batch else out, text, args.force)
        if render is not None:
            target = render / f"{path.stem}.ppm" if batch else render
            _guard_output(target, args.force)
            rgb = img if img.channels == 3 else Image(img.pixels.repeat(3, axis=2))
            save_image(draw_boxes(rgb, boxes), target)
        log.info("%s: %d detections", path, len(boxes))
    return EXIT_OK


def cmd_classify(args) -> int:
    spec, weights = _load_model(args.config, args.weights)
    img = load_image(args.image)
    y = forward(spec, weights, preprocess(img, spec.input_size, spec.color_mode, spec.input_scale))
    if isinstance(spec.head, ClassifyV1):
        scores = decode_v1(y, spec.head.num_classes)
    elif isinstance(spec.head, ClassifyV2):
        scores = decode_v2(y, spec.head.num_classes)
    else:
        raise SpecError(f"{args.config} is not a classification model")
    sys.stdout.write(format_top_k(scores, args.top_k))
    return EXIT_OK


def cmd_eval(args) -> int:
    names = _names(args)
    gts = formats.read_ground_truth(args.ground_truth)
    dets = formats.read_detections(args.detections, names)
    image_ids = None
    if Path(args.detections).is_dir():
        image_ids = [p.stem for p in Path(args.detections).glob("*.txt")]
    result = evaluate(dets, gts, args.iou, image_ids=image_ids, method=args.method)
    sys.stdout.write(result.format(names))
    return EXIT_OK


def cmd_bench(args) -> int:
    spec, weights = _load_model(args.config, args.weights)
    if not isinstance(spec.head, Detection):
        raise SpecError(f"{args.config} is not a detection model")
    images = [load_image(p) for src in args.images for p in _image_paths(Path(src))]
    timings = bench.run_benchmark(spec, weights, images, _decode_cfg(args), args.warmup, args.iterations,
                                  parallel=args.parallel)
    text = bench.report(timings, args.format)
    if args.out:
        _write_text(Path(args.out), text, args.force)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_convert_voc(args) -> int:
    names = formats.load_names(args.names) if args.names else formats.VOC_CLASSES
    src = Path(args.xml_dir)
    files = sorted(src.glob("*.xml")) if src.is_dir() else [src]
    if not files or not files[0].exists():
        raise FormatError(f"no VOC annotation files at {src}")
    gts = [g for f in files for g in formats.voc_xml_to_ground_truth(f, names)]
    _write_text(Path(args.out), formats.format_ground_truth(gts), args.force)
    print(f"wrote {len(gts)} ground-truth boxes from {len(files)} file(s)")
    return EXIT_OK


def _add_thresholds(p):
    d = DecodeConfig()
    p.add_argument("--conf-threshold", type=float, default=d.confidence_threshold)
    p.add_argument("--score-threshold", type=float, default=d.score_threshold)
    p.add_argument("--nms-threshold", type=float, default=d.nms_iou_threshold)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gnetdet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a model config against the chip rules")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("init", help="write a canonical model config and seeded random weights")
    p.add_argument("arch", choices=sorted(BUILDERS))
    p.add_argument("--size", type=int, choices=(224, 448), default=224)
    p.add_argument("--mode", choices=("y", "rgb", "yuv"), default="y")
    p.add_argument("--classes", type=int, default=20)
    p.add_argument("--grid", type=int, choices=(7, 14), default=7, help="GnetFC-v2 score grid")
    p.add_argument("--channels", type=int, default=256, help="GnetFC-v2 head channels")
    p.add_argument("--max-channels", type=int, default=512, help="chip channel-width ceiling")
    p.add_argument("--head-relu", action="store_true", help="put ReLU on the final sublayer too")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", required=True, help="output config path")
    p.add_argument("--weights", required=True, help="output weight file path")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("detect", help="run detection on a PPM/PGM image or a directory of them")
    p.add_argument("config")
    p.add_argument("weights")
    p.add_argument("image")
    p.add_argument("--out", help="detections file (or directory in batch mode); stdout if omitted")
    p.add_argument("--render", help="write a PPM with boxes drawn (directory in batch mode)")
    p.add_argument("--names", help="class-name file, one per line")
    p.add_argument("--force", action="store_true")
    _add_thresholds(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("classify", help="top-k classes from a GnetFC model")
    p.add_argument("config")
    p.add_argument("weights")
    p.add_argument("image")
    p.add_argument("--top-k", type=int, default=5)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="VOC mAP of detections against ground truth")
    p.add_argument("detections", help="directory of <image_id>.txt files, or one prefixed file")
    p.add_argument("ground_truth")
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--method", choices=("11point", "continuous"), default="11point")
    p.add_argument("--names", help="class-name file, one per line")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="stage-resolved timing of the detection pipeline")
    p.add_argument("config")
    p.add_argument("weights")
    p.add_argument("images", nargs="+")
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--parallel", action="store_true", help="allow multi-threaded kernels")
    p.add_argument("--format", choices=("text", "kv"), default="text")
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")
    _add_thresholds(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("convert-voc", help="VOC XML annotations to ground-truth lines")
    p.add_argument("xml_dir")
    p.add_argument("out")
    p.add_argument("--names", help="class-name file, one per line")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_convert_voc)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gnetdet: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpecError, CapacityError) as exc:
        print(f"gnetdet: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (FormatError, ShapeError, OSError) as exc:
        print(f"gnetdet: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"gnetdet: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
