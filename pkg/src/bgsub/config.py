"""Run configuration: dataclasses plus strict JSON loading.

Every section rejects unknown keys so a typo in a config file fails the
run instead of silently using a default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .events import EventParams, Zone
from .gmm import ModelParams
from .segmentation import EIGHT, FOUR
from .shadow import ShadowParams


@dataclass
class SegmentationParams:
    connectivity: str = EIGHT
    min_area: int = 15

    def __post_init__(self) -> None:
        if self.connectivity not in (FOUR, EIGHT):
            raise ValueError(f"connectivity must be 'four' or 'eight', got {self.connectivity!r}")
        if self.min_area < 1:
            raise ValueError(f"min_area must be >= 1, got {self.min_area}")


@dataclass
class EmitFlags:
    masks: bool = True
    overlays: bool = True
    events: bool = True
    stats: bool = True


@dataclass
class RunConfig:
    input: str | None = None
    output: str | None = None
    width: int | None = None
    height: int | None = None
    max_frames: int | None = None
    workers: int = 1
    queue_depth: int = 4
    model: ModelParams = field(default_factory=ModelParams)
    shadow: ShadowParams = field(default_factory=ShadowParams)
    segmentation: SegmentationParams = field(default_factory=SegmentationParams)
    events: EventParams = field(default_factory=EventParams)
    zones: list[Zone] = field(default_factory=list)
    emit: EmitFlags = field(default_factory=EmitFlags)

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.queue_depth < 1:
            raise ValueError(f"queue_depth must be >= 1, got {self.queue_depth}")
        for name in ("width", "height"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")
        if self.max_frames is not None and self.max_frames < 0:
            raise ValueError(f"max_frames must be >= 0, got {self.max_frames}")
        names = [zone.name for zone in self.zones]
        if len(names) != len(set(names)):
            raise ValueError(f"zone names must be unique, got {names}")


def _build(cls, data, where: str):
    """Instantiate a flat parameter dataclass from a JSON object."""
    if not isinstance(data, dict):
        raise ValueError(f"{where}: expected an object, got {type(data).__name__}")
    allowed = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ValueError(f"{where}: unknown keys {unknown}")
    kwargs = {}
    for key, value in data.items():
        ftype = allowed[key].type
        if ftype == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{where}.{key}: expected a number, got {value!r}")
            kwargs[key] = float(value)
        elif ftype == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"{where}.{key}: expected an integer, got {value!r}")
            kwargs[key] = value
        elif ftype == "bool":
            if not isinstance(value, bool):
                raise ValueError(f"{where}.{key}: expected true/false, got {value!r}")
            kwargs[key] = value
        else:
            if not isinstance(value, str):
                raise ValueError(f"{where}.{key}: expected a string, got {value!r}")
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def _zone_from(data, where: str) -> Zone:
    if not isinstance(data, dict):
        raise ValueError(f"{where}: expected an object")
    unknown = sorted(set(data) - {"name", "rect"})
    if unknown:
        raise ValueError(f"{where}: unknown keys {unknown}")
    name = data.get("name")
    rect = data.get("rect")
    if not isinstance(name, str) or not name:
        raise ValueError(f"{where}.name: expected a non-empty string")
    if (
        not isinstance(rect, list)
        or len(rect) != 4
        or any(isinstance(v, bool) or not isinstance(v, int) for v in rect)
    ):
        raise ValueError(f"{where}.rect: expected [x0, y0, x1, y1] integers")
    return Zone(name=name, rect=(rect[0], rect[1], rect[2], rect[3]))


_TOP_LEVEL = {
    "input",
    "output",
    "width",
    "height",
    "max_frames",
    "workers",
    "queue_depth",
    "model",
    "shadow",
    "segmentation",
    "events",
    "zones",
    "emit",
}

_OPTIONAL_INT = ("width", "height", "max_frames")
_REQUIRED_INT = ("workers", "queue_depth")


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ValueError(f"config: expected an object, got {type(data).__name__}")
    unknown = sorted(set(data) - _TOP_LEVEL)
    if unknown:
        raise ValueError(f"config: unknown keys {unknown}")
    kwargs: dict = {}
    for key in ("input", "output"):
        if key in data:
            value = data[key]
            if value is not None and not isinstance(value, str):
                raise ValueError(f"config.{key}: expected a string path, got {value!r}")
            kwargs[key] = value
    for key in _OPTIONAL_INT + _REQUIRED_INT:
        if key in data:
            value = data[key]
            if value is None and key in _OPTIONAL_INT:
                continue
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"config.{key}: expected an integer, got {value!r}")
            kwargs[key] = value
    kwargs["model"] = _build(ModelParams, data.get("model", {}), "model")
    kwargs["shadow"] = _build(ShadowParams, data.get("shadow", {}), "shadow")
    kwargs["segmentation"] = _build(SegmentationParams, data.get("segmentation", {}), "segmentation")
    kwargs["events"] = _build(EventParams, data.get("events", {}), "events")
    kwargs["emit"] = _build(EmitFlags, data.get("emit", {}), "emit")
    zones_raw = data.get("zones", [])
    if not isinstance(zones_raw, list):
        raise ValueError("config.zones: expected a list")
    kwargs["zones"] = [_zone_from(z, f"zones[{i}]") for i, z in enumerate(zones_raw)]
    return RunConfig(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON config file into a validated RunConfig."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path}: {exc}") from None
    return config_from_dict(data)
