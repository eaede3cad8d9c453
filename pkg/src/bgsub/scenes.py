"""Synthetic scenes with exact ground truth.

A scene is a flat background color plus optional flickering rectangles, a
global illumination ramp, timed shadow patches, and rectangular actors
moving along piecewise-linear waypoint tracks. Gaussian pixel noise is
drawn from a seeded generator, so the same spec and seed always produce
byte-identical frames. Ground truth marks actor pixels as foreground and
active shadow patches (where not occluded by an actor) as shadow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SpecOutOfBounds
from .gmm import BACKGROUND, FOREGROUND
from .netpbm import encode_pgm, encode_ppm
from .shadow import SHADOW

Color = tuple[int, int, int]
Rect = tuple[int, int, int, int]  # x0, y0, x1, y1 inclusive


@dataclass(frozen=True)
class Waypoint:
    frame: int
    x: int
    y: int


@dataclass(frozen=True)
class Actor:
    """Solid rectangle of a fixed color following waypoints.

    Position interpolates linearly between waypoints and clamps outside
    their frame range. halt_at freezes the actor at its position of that
    frame for the rest of the scene. The actor is only painted while
    from_frame <= frame <= to_frame (to_frame None meaning scene end),
    which lets a scene establish its background before anything enters.
    """

    size: tuple[int, int]
    color: Color
    waypoints: tuple[Waypoint, ...]
    halt_at: int | None = None
    from_frame: int = 0
    to_frame: int | None = None


@dataclass(frozen=True)
class ShadowPatch:
    """Multiplies a rectangle by gain while active (frames inclusive)."""

    rect: Rect
    gain: float
    from_frame: int = 0
    to_frame: int | None = None


@dataclass(frozen=True)
class Flicker:
    """Rectangle alternating between two colors every period frames."""

    rect: Rect
    colors: tuple[Color, Color]
    period: int


@dataclass(frozen=True)
class GainRamp:
    """Global illumination multiplier sliding from start to end over the scene."""

    start: float
    end: float


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    frames: int
    background: Color = (120, 120, 120)
    noise_sigma: float = 2.0
    actors: tuple[Actor, ...] = ()
    shadows: tuple[ShadowPatch, ...] = ()
    flickers: tuple[Flicker, ...] = ()
    ramp: GainRamp | None = None

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise SpecOutOfBounds(f"raster {self.width}x{self.height} is empty")
        if self.frames < 1:
            raise SpecOutOfBounds(f"frames must be >= 1, got {self.frames}")
        if self.noise_sigma < 0.0:
            raise SpecOutOfBounds(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        _check_color(self.background, "background")
        for i, actor in enumerate(self.actors):
            self._check_actor(actor, f"actors[{i}]")
        for i, patch in enumerate(self.shadows):
            self._check_rect(patch.rect, f"shadows[{i}]")
            if not 0.0 < patch.gain < 1.0:
                raise SpecOutOfBounds(f"shadows[{i}]: gain must be in (0, 1), got {patch.gain}")
            if patch.from_frame < 0:
                raise SpecOutOfBounds(f"shadows[{i}]: from_frame must be >= 0")
            if patch.to_frame is not None and patch.to_frame < patch.from_frame:
                raise SpecOutOfBounds(f"shadows[{i}]: to_frame before from_frame")
        for i, flicker in enumerate(self.flickers):
            self._check_rect(flicker.rect, f"flickers[{i}]")
            if flicker.period < 1:
                raise SpecOutOfBounds(f"flickers[{i}]: period must be >= 1")
            _check_color(flicker.colors[0], f"flickers[{i}].colors[0]")
            _check_color(flicker.colors[1], f"flickers[{i}].colors[1]")
        if self.ramp is not None and (self.ramp.start <= 0.0 or self.ramp.end <= 0.0):
            raise SpecOutOfBounds("ramp gains must be positive")

    def _check_rect(self, rect: Rect, where: str) -> None:
        x0, y0, x1, y1 = rect
        if not (0 <= x0 <= x1 < self.width and 0 <= y0 <= y1 < self.height):
            raise SpecOutOfBounds(f"{where}: rect {rect} outside {self.width}x{self.height}")

    def _check_actor(self, actor: Actor, where: str) -> None:
        w, h = actor.size
        if w < 1 or h < 1:
            raise SpecOutOfBounds(f"{where}: size {actor.size} is empty")
        _check_color(actor.color, f"{where}.color")
        if not actor.waypoints:
            raise SpecOutOfBounds(f"{where}: needs at least one waypoint")
        if actor.from_frame < 0:
            raise SpecOutOfBounds(f"{where}: from_frame must be >= 0")
        if actor.to_frame is not None and actor.to_frame < actor.from_frame:
            raise SpecOutOfBounds(f"{where}: to_frame before from_frame")
        last = None
        for j, wp in enumerate(actor.waypoints):
            if last is not None and wp.frame <= last:
                raise SpecOutOfBounds(f"{where}: waypoint frames must increase")
            last = wp.frame
            if not (0 <= wp.x <= self.width - w and 0 <= wp.y <= self.height - h):
                raise SpecOutOfBounds(
                    f"{where}.waypoints[{j}]: actor of size {actor.size} at "
                    f"({wp.x}, {wp.y}) leaves the raster"
                )


def _check_color(color, where: str) -> None:
    if len(color) != 3 or any(not 0 <= c <= 255 for c in color):
        raise SpecOutOfBounds(f"{where}: color {color} out of range")


def actor_position(actor: Actor, frame: int) -> tuple[int, int]:
    """Top-left corner at a frame: clamped piecewise-linear interpolation."""
    f = frame if actor.halt_at is None else min(frame, actor.halt_at)
    wps = actor.waypoints
    if f <= wps[0].frame:
        return wps[0].x, wps[0].y
    if f >= wps[-1].frame:
        return wps[-1].x, wps[-1].y
    for a, b in zip(wps, wps[1:]):
        if a.frame <= f <= b.frame:
            u = (f - a.frame) / (b.frame - a.frame)
            return round(a.x + u * (b.x - a.x)), round(a.y + u * (b.y - a.y))
    raise AssertionError("waypoint bracket not found")


def generate_scene(spec: SceneSpec, seed: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Render all frames and their truth rasters.

    Returns (frames, truths): uint8 (h, w, 3) images and (h, w) class
    maps using the mask conventions (0 background, 128 shadow, 255
    foreground). Deterministic in (spec, seed).
    """
    rng = np.random.default_rng(seed)
    h, w = spec.height, spec.width
    base = np.empty((h, w, 3), dtype=np.float64)
    base[:] = spec.background
    frames = []
    truths = []
    denom = max(spec.frames - 1, 1)
    for f in range(spec.frames):
        img = base.copy()
        truth = np.full((h, w), BACKGROUND, dtype=np.uint8)
        for flicker in spec.flickers:
            x0, y0, x1, y1 = flicker.rect
            phase = (f // flicker.period) % 2
            img[y0 : y1 + 1, x0 : x1 + 1] = flicker.colors[phase]
        if spec.ramp is not None:
            gain = spec.ramp.start + (spec.ramp.end - spec.ramp.start) * (f / denom)
            img *= gain
        for patch in spec.shadows:
            active = patch.from_frame <= f and (patch.to_frame is None or f <= patch.to_frame)
            if active:
                x0, y0, x1, y1 = patch.rect
                img[y0 : y1 + 1, x0 : x1 + 1] *= patch.gain
                truth[y0 : y1 + 1, x0 : x1 + 1] = SHADOW
        for actor in spec.actors:
            present = actor.from_frame <= f and (actor.to_frame is None or f <= actor.to_frame)
            if not present:
                continue
            ax, ay = actor_position(actor, f)
            aw, ah = actor.size
            img[ay : ay + ah, ax : ax + aw] = actor.color
            truth[ay : ay + ah, ax : ax + aw] = FOREGROUND
        if spec.noise_sigma > 0.0:
            img = img + rng.normal(0.0, spec.noise_sigma, img.shape)
        frames.append(np.clip(np.rint(img), 0, 255).astype(np.uint8))
        truths.append(truth)
    return frames, truths


def write_scene(spec: SceneSpec, seed: int, out_dir: str | Path) -> int:
    """Render a scene to frame_%06d.ppm plus truth_%06d.pgm files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames, truths = generate_scene(spec, seed)
    for i, (frame, truth) in enumerate(zip(frames, truths)):
        (out / f"frame_{i:06d}.ppm").write_bytes(encode_ppm(frame))
        (out / f"truth_{i:06d}.pgm").write_bytes(encode_pgm(truth))
    return len(frames)


def standard_scene() -> SceneSpec:
    """Reference scene used by the scoring gate and the benchmark.

    A gray 160x120 room with mild sensor noise; a red-brick square
    crosses the room and returns while a soft shadow band sweeps the
    floor strip for 25 frames mid-run.
    """
    return SceneSpec(
        width=160,
        height=120,
        frames=100,
        background=(120, 120, 120),
        noise_sigma=2.0,
        actors=(
            Actor(
                size=(20, 20),
                color=(180, 60, 60),
                waypoints=(Waypoint(20, 6, 30), Waypoint(60, 106, 80), Waypoint(100, 56, 30)),
                from_frame=20,
            ),
        ),
        shadows=(ShadowPatch(rect=(10, 102, 149, 118), gain=0.6, from_frame=60, to_frame=84),),
    )


def scene_from_dict(data: dict) -> SceneSpec:
    """Build a SceneSpec from parsed JSON; strict about keys and shapes."""
    if not isinstance(data, dict):
        raise ValueError(f"scene: expected an object, got {type(data).__name__}")
    allowed = {
        "width",
        "height",
        "frames",
        "background",
        "noise_sigma",
        "actors",
        "shadows",
        "flickers",
        "ramp",
    }
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"scene: unknown keys {unknown}")
    kwargs: dict = {}
    for key in ("width", "height", "frames"):
        if key not in data:
            raise ValueError(f"scene: missing required key {key!r}")
        kwargs[key] = _as_int(data[key], f"scene.{key}")
    if "background" in data:
        kwargs["background"] = _as_color(data["background"], "scene.background")
    if "noise_sigma" in data:
        kwargs["noise_sigma"] = _as_float(data["noise_sigma"], "scene.noise_sigma")
    if "actors" in data:
        kwargs["actors"] = tuple(
            _actor_from(a, f"scene.actors[{i}]") for i, a in enumerate(_as_list(data["actors"], "scene.actors"))
        )
    if "shadows" in data:
        kwargs["shadows"] = tuple(
            _shadow_from(s, f"scene.shadows[{i}]") for i, s in enumerate(_as_list(data["shadows"], "scene.shadows"))
        )
    if "flickers" in data:
        kwargs["flickers"] = tuple(
            _flicker_from(fl, f"scene.flickers[{i}]")
            for i, fl in enumerate(_as_list(data["flickers"], "scene.flickers"))
        )
    if "ramp" in data and data["ramp"] is not None:
        ramp = data["ramp"]
        if not isinstance(ramp, dict) or set(ramp) != {"start", "end"}:
            raise ValueError("scene.ramp: expected {start, end}")
        kwargs["ramp"] = GainRamp(_as_float(ramp["start"], "scene.ramp.start"), _as_float(ramp["end"], "scene.ramp.end"))
    return SceneSpec(**kwargs)


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{where}: expected an integer, got {value!r}")
    return value


def _as_float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _as_list(value, where: str) -> list:
    if not isinstance(value, list):
        raise ValueError(f"{where}: expected a list")
    return value


def _as_color(value, where: str) -> Color:
    if not isinstance(value, list) or len(value) != 3:
        raise ValueError(f"{where}: expected [r, g, b]")
    return (_as_int(value[0], where), _as_int(value[1], where), _as_int(value[2], where))


def _as_rect(value, where: str) -> Rect:
    if not isinstance(value, list) or len(value) != 4:
        raise ValueError(f"{where}: expected [x0, y0, x1, y1]")
    return tuple(_as_int(v, where) for v in value)  # type: ignore[return-value]


def _actor_from(data, where: str) -> Actor:
    if not isinstance(data, dict):
        raise ValueError(f"{where}: expected an object")
    unknown = sorted(set(data) - {"size", "color", "waypoints", "halt_at", "from_frame", "to_frame"})
    if unknown:
        raise ValueError(f"{where}: unknown keys {unknown}")
    size = data.get("size")
    if not isinstance(size, list) or len(size) != 2:
        raise ValueError(f"{where}.size: expected [w, h]")
    waypoints = []
    for j, wp in enumerate(_as_list(data.get("waypoints", []), f"{where}.waypoints")):
        if not isinstance(wp, dict) or set(wp) != {"frame", "x", "y"}:
            raise ValueError(f"{where}.waypoints[{j}]: expected {{frame, x, y}}")
        waypoints.append(
            Waypoint(
                _as_int(wp["frame"], f"{where}.waypoints[{j}].frame"),
                _as_int(wp["x"], f"{where}.waypoints[{j}].x"),
                _as_int(wp["y"], f"{where}.waypoints[{j}].y"),
            )
        )
    halt = data.get("halt_at")
    to_frame = data.get("to_frame")
    return Actor(
        size=(_as_int(size[0], f"{where}.size"), _as_int(size[1], f"{where}.size")),
        color=_as_color(data.get("color"), f"{where}.color"),
        waypoints=tuple(waypoints),
        halt_at=None if halt is None else _as_int(halt, f"{where}.halt_at"),
        from_frame=_as_int(data.get("from_frame", 0), f"{where}.from_frame"),
        to_frame=None if to_frame is None else _as_int(to_frame, f"{where}.to_frame"),
    )


def _shadow_from(data, where: str) -> ShadowPatch:
    if not isinstance(data, dict):
        raise ValueError(f"{where}: expected an object")
    unknown = sorted(set(data) - {"rect", "gain", "from_frame", "to_frame"})
    if unknown:
        raise ValueError(f"{where}: unknown keys {unknown}")
    to_frame = data.get("to_frame")
    return ShadowPatch(
        rect=_as_rect(data.get("rect"), f"{where}.rect"),
        gain=_as_float(data.get("gain"), f"{where}.gain"),
        from_frame=_as_int(data.get("from_frame", 0), f"{where}.from_frame"),
        to_frame=None if to_frame is None else _as_int(to_frame, f"{where}.to_frame"),
    )


def _flicker_from(data, where: str) -> Flicker:
    if not isinstance(data, dict):
        raise ValueError(f"{where}: expected an object")
    unknown = sorted(set(data) - {"rect", "colors", "period"})
    if unknown:
        raise ValueError(f"{where}: unknown keys {unknown}")
    colors = data.get("colors")
    if not isinstance(colors, list) or len(colors) != 2:
        raise ValueError(f"{where}.colors: expected two [r, g, b] entries")
    return Flicker(
        rect=_as_rect(data.get("rect"), f"{where}.rect"),
        colors=(_as_color(colors[0], f"{where}.colors[0]"), _as_color(colors[1], f"{where}.colors[1]")),
        period=_as_int(data.get("period"), f"{where}.period"),
    )
