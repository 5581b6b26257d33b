"""Microworld data model: colored shapes in the unit square, plus world sampling."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from random import Random


class Shape(Enum):
    SQUARE = "square"
    RECTANGLE = "rectangle"
    TRIANGLE = "triangle"
    PENTAGON = "pentagon"
    CROSS = "cross"
    CIRCLE = "circle"
    SEMICIRCLE = "semicircle"
    ELLIPSE = "ellipse"


class Color(Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    YELLOW = "yellow"
    MAGENTA = "magenta"
    CYAN = "cyan"
    GRAY = "gray"


SIZE_MIN = 0.08
SIZE_MAX = 0.25
OVERLAP_THRESHOLD = 0.25
MAX_SAMPLE_ATTEMPTS = 1000

# shapes that are sampled with equal width and height
_EQUILATERAL = {Shape.SQUARE, Shape.CIRCLE, Shape.PENTAGON, Shape.CROSS, Shape.SEMICIRCLE}

# keeps quantized bounding boxes strictly inside the canvas
_EDGE_MARGIN = 1e-4

TASKS = (
    "existential-oneshape",
    "existential-multishapes",
    "spatial-twoshapes",
    "spatial-multishapes",
    "quant-count",
    "quant-ratio",
)

MULTISHAPE_RANGE = (4, 8)


class SamplingError(Exception):
    """World sampling could not satisfy the spec within the attempt budget."""


@dataclass(frozen=True)
class Entity:
    """One object: shape, color, center in the unit square, size, rotation."""

    shape: Shape
    color: Color
    center: tuple[float, float]
    size: tuple[float, float]
    rotation: float


@dataclass(frozen=True)
class WorldModel:
    id: str
    entities: tuple[Entity, ...]


@dataclass(frozen=True)
class WorldSpec:
    """Sampling constraints for one dataset variant."""

    entity_count: tuple[int, int]
    overlap_threshold: float = OVERLAP_THRESHOLD
    task: str = "existential-multishapes"


def task_world_spec(task: str) -> WorldSpec:
    """Map a dataset variant to its world sampling constraints."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}, expected one of {', '.join(TASKS)}")
    if task == "existential-oneshape":
        count = (1, 1)
    elif task == "spatial-twoshapes":
        count = (2, 2)
    else:
        count = MULTISHAPE_RANGE
    return WorldSpec(entity_count=count, task=task)


def validate_spec(spec: WorldSpec) -> None:
    lo, hi = spec.entity_count
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid entity count range {spec.entity_count}")
    if not 0.0 <= spec.overlap_threshold < 1.0:
        raise ValueError(f"overlap threshold {spec.overlap_threshold} outside [0, 1)")


def bounding_box(e: Entity) -> tuple[float, float, float, float]:
    """Axis-aligned box (x0, y0, x1, y1) containing the rotated shape outline."""
    hw, hh = e.size[0] / 2.0, e.size[1] / 2.0
    c = abs(math.cos(e.rotation))
    s = abs(math.sin(e.rotation))
    hx = hw * c + hh * s
    hy = hw * s + hh * c
    cx, cy = e.center
    return (cx - hx, cy - hy, cx + hx, cy + hy)


def overlap_ratio(a: Entity, b: Entity) -> float:
    """Bounding-box intersection area divided by the smaller box's area."""
    ax0, ay0, ax1, ay1 = bounding_box(a)
    bx0, by0, bx1, by1 = bounding_box(b)
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    smaller = min((ax1 - ax0) * (ay1 - ay0), (bx1 - bx0) * (by1 - by0))
    return (iw * ih) / smaller


def _quantize(x: float) -> float:
    # 6 decimal places, matching the serialization precision, so that a
    # sampled world round-trips through JSON without any change
    return round(x, 6)


def _sample_entity(rng: Random) -> Entity:
    shape = rng.choice(list(Shape))
    color = rng.choice(list(Color))
    w = _quantize(rng.uniform(SIZE_MIN, SIZE_MAX))
    h = w if shape in _EQUILATERAL else _quantize(rng.uniform(SIZE_MIN, SIZE_MAX))
    rotation = rng.uniform(0.0, math.tau)
    if rotation >= math.tau:
        rotation = 0.0
    rotation = _quantize(rotation)

    hw, hh = w / 2.0, h / 2.0
    c = abs(math.cos(rotation))
    s = abs(math.sin(rotation))
    hx = hw * c + hh * s
    hy = hw * s + hh * c
    cx = _quantize(rng.uniform(hx + _EDGE_MARGIN, 1.0 - hx - _EDGE_MARGIN))
    cy = _quantize(rng.uniform(hy + _EDGE_MARGIN, 1.0 - hy - _EDGE_MARGIN))
    return Entity(shape=shape, color=color, center=(cx, cy), size=(w, h), rotation=rotation)


def sample_world(spec: WorldSpec, rng: Random, world_id: str = "world") -> WorldModel:
    """Sample a world satisfying the spec, rejection-resampling colliding entities.

    Raises SamplingError when the overlap constraint cannot be met within
    MAX_SAMPLE_ATTEMPTS entity draws (e.g. too many large entities requested).
    """
    validate_spec(spec)
    n = rng.randint(spec.entity_count[0], spec.entity_count[1])
    # spatial-twoshapes pairs must differ in both shape and color, so that a
    # descriptor of one entity can never pick out the other
    distinct = spec.task == "spatial-twoshapes"
    entities: list[Entity] = []
    attempts = 0
    while len(entities) < n:
        attempts += 1
        if attempts > MAX_SAMPLE_ATTEMPTS:
            raise SamplingError(
                f"no valid placement for entity {len(entities) + 1}/{n} "
                f"after {MAX_SAMPLE_ATTEMPTS} attempts (task {spec.task})"
            )
        e = _sample_entity(rng)
        if any(overlap_ratio(e, other) > spec.overlap_threshold for other in entities):
            continue
        if distinct and any(e.shape is o.shape or e.color is o.color for o in entities):
            continue
        entities.append(e)
    return WorldModel(id=world_id, entities=tuple(entities))


def validate_entity(e: Entity) -> None:
    """Check the sampling invariants; direct construction may ignore them."""
    if not (0.0 <= e.center[0] <= 1.0 and 0.0 <= e.center[1] <= 1.0):
        raise ValueError(f"center {e.center} outside unit square")
    for v in e.size:
        if not SIZE_MIN <= v <= SIZE_MAX:
            raise ValueError(f"size component {v} outside [{SIZE_MIN}, {SIZE_MAX}]")
    if not 0.0 <= e.rotation < math.tau:
        raise ValueError(f"rotation {e.rotation} outside [0, 2*pi)")
    x0, y0, x1, y1 = bounding_box(e)
    if x0 < 0.0 or y0 < 0.0 or x1 > 1.0 or y1 > 1.0:
        raise ValueError(f"bounding box ({x0}, {y0}, {x1}, {y1}) leaves the canvas")


def validate_world(w: WorldModel, spec: WorldSpec | None = None) -> None:
    if not w.entities:
        raise ValueError("world has no entities")
    for e in w.entities:
        validate_entity(e)
    if spec is not None:
        lo, hi = spec.entity_count
        if not lo <= len(w.entities) <= hi:
            raise ValueError(f"entity count {len(w.entities)} outside [{lo}, {hi}]")
        for i, a in enumerate(w.entities):
            for b in w.entities[i + 1 :]:
                if overlap_ratio(a, b) > spec.overlap_threshold:
                    raise ValueError("overlap constraint violated")


def world_to_record(w: WorldModel) -> dict:
    return {
        "id": w.id,
        "entities": [
            {
                "shape": e.shape.value,
                "color": e.color.value,
                "center": {"x": _quantize(e.center[0]), "y": _quantize(e.center[1])},
                "size": {"w": _quantize(e.size[0]), "h": _quantize(e.size[1])},
                "rotation": _quantize(e.rotation),
            }
            for e in w.entities
        ],
    }


def world_from_record(record: dict) -> WorldModel:
    entities = tuple(
        Entity(
            shape=Shape(d["shape"]),
            color=Color(d["color"]),
            center=(d["center"]["x"], d["center"]["y"]),
            size=(d["size"]["w"], d["size"]["h"]),
            rotation=d["rotation"],
        )
        for d in record["entities"]
    )
    return WorldModel(id=record["id"], entities=entities)


def world_to_json(w: WorldModel) -> str:
    return json.dumps(world_to_record(w), ensure_ascii=False)


def world_from_json(line: str) -> WorldModel:
    return world_from_record(json.loads(line))
