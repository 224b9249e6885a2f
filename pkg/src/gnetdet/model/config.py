"""Human-editable model config files (INI syntax, ``.cfg``).

Layout::

    [model]
    name = gnetdet-large-224-y-20
    input_size = 224
    input_channels = 1
    color_mode = y
    input_scale = 0.00392156862745098
    max_channels = 512
    head = detection          ; detection | classify-v1 | classify-v2
    num_classes = 20
    ; grid = 7                ; classify-v2 only

    [major1]
    pool_before = no
    pool_after = yes
    sublayers =
        1 64 same relu
        64 64 same relu

Major-layer sections are ``major1`` .. ``majorN`` and run in numeric order.
Each sublayer line is ``<in> <out> <same|valid> <relu|none>``.
"""

from __future__ import annotations

import configparser
import hashlib
import re
from pathlib import Path

from gnetdet.errors import FormatError, SpecError
from gnetdet.model.spec import (
    DEFAULT_INPUT_SCALE,
    DEFAULT_MAX_CHANNELS,
    ClassifyV1,
    ClassifyV2,
    Detection,
    MajorLayer,
    ModelSpec,
    SubLayer,
)

_HEAD_NAMES = {Detection: "detection", ClassifyV1: "classify-v1", ClassifyV2: "classify-v2"}
_MAJOR_RE = re.compile(r"^major(\d+)$")


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def spec_to_text(spec: ModelSpec, *, include_name: bool = True) -> str:
    """Canonical serialization; byte-stable for equal specs."""
    lines = ["[model]"]
    if include_name:
        lines.append(f"name = {spec.name}")
    lines += [
        f"input_size = {spec.input_size}",
        f"input_channels = {spec.input_channels}",
        f"color_mode = {spec.color_mode}",
        f"input_scale = {spec.input_scale!r}",
        f"max_channels = {spec.max_channels}",
        f"head = {_HEAD_NAMES[type(spec.head)]}",
        f"num_classes = {spec.head.num_classes}",
    ]
    if isinstance(spec.head, ClassifyV2):
        lines.append(f"grid = {spec.head.grid}")
    for i, major in enumerate(spec.major_layers, 1):
        lines += ["", f"[major{i}]", f"pool_before = {_yesno(major.pool_before)}",
                  f"pool_after = {_yesno(major.pool_after)}", "sublayers ="]
        for sub in major.sublayers:
            lines.append(f"    {sub.in_channels} {sub.out_channels} {sub.padding.value} {sub.activation.value}")
    return "\n".join(lines) + "\n"


def fingerprint(spec: ModelSpec) -> int:
    """64-bit architecture hash; the display name does not take part."""
    digest = hashlib.sha256(spec_to_text(spec, include_name=False).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def spec_from_text(text: str) -> ModelSpec:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
        m = parser["model"]
        head_name = m.get("head", "detection").strip()
        num_classes = m.getint("num_classes")
        if num_classes is None:
            raise FormatError("[model] is missing num_classes")
        if head_name == "detection":
            head = Detection(num_classes)
        elif head_name == "classify-v1":
            head = ClassifyV1(num_classes)
        elif head_name == "classify-v2":
            head = ClassifyV2(num_classes, m.getint("grid", 7))
        else:
            raise FormatError(f"unknown head kind {head_name!r}")

        majors = []
        for section in parser.sections():
            match = _MAJOR_RE.match(section)
            if match:
                majors.append((int(match.group(1)), parser[section]))
            elif section != "model":
                raise FormatError(f"unexpected section [{section}]")
        majors.sort(key=lambda t: t[0])
        if [k for k, _ in majors] != list(range(1, len(majors) + 1)):
            raise FormatError("major layer sections must be numbered major1..majorN without gaps")

        layers = []
        for _, sec in majors:
            subs = []
            for raw in sec.get("sublayers", "").splitlines():
                raw = raw.strip()
                if not raw:
                    continue
                parts = raw.split()
                if len(parts) != 4:
                    raise FormatError(f"sublayer line needs '<in> <out> <padding> <activation>', got {raw!r}")
                subs.append(SubLayer(int(parts[0]), int(parts[1]), parts[2].lower(), parts[3].lower()))
            layers.append(MajorLayer(tuple(subs), pool_after=sec.getboolean("pool_after", False),
                                     pool_before=sec.getboolean("pool_before", False)))

        return ModelSpec(
            name=m.get("name", "unnamed"),
            input_size=m.getint("input_size"),
            input_channels=m.getint("input_channels"),
            major_layers=tuple(layers),
            head=head,
            color_mode=m.get("color_mode"),
            max_channels=m.getint("max_channels", DEFAULT_MAX_CHANNELS),
            input_scale=m.getfloat("input_scale", DEFAULT_INPUT_SCALE),
        )
    except FormatError:
        raise
    except (configparser.Error, KeyError, TypeError, ValueError, SpecError) as exc:
        raise FormatError(f"bad model config: {exc}") from exc


def save_spec(spec: ModelSpec, path) -> None:
    Path(path).write_text(spec_to_text(spec), encoding="utf-8")


def load_spec(path) -> ModelSpec:
    return spec_from_text(Path(path).read_text(encoding="utf-8"))


def bundled_configs() -> dict[str, Path]:
    """Shipped architecture configs keyed by model name."""
    from importlib.resources import files

    root = Path(str(files("gnetdet") / "configs"))
    return {p.stem: p for p in sorted(root.glob("*.cfg"))}
