"""Seeded generators for the three evaluation tasks.

All geometry lives in meters. The slider runs along +x from the origin;
the tracing canvas is a 1 m x 1 m frame centered on the origin (x right,
y up) with shapes inset by 10% padding; placement targets sit on a random
shell 3-4 m from the object's start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

SLIDER_LENGTH_M = 1.5
SLIDER_TARGET_RANGE = (0.5, 0.8)
CANVAS_SIZE_M = 1.0
CANVAS_PADDING = 0.1
PLACEMENT_DISTANCE_RANGE = (3.0, 4.0)
SMOOTH_SHAPE_VERTICES = 512

# Shapes are centered in the canvas and touch the padded bounds.
_HALF_EXTENT = CANVAS_SIZE_M / 2.0 * (1.0 - 2.0 * CANVAS_PADDING)  # 0.4 m

SPIRAL_TURNS = 2
STAR_POINTS = 5
STAR_INNER_RATIO = 0.5


class Shape(str, Enum):
    CIRCLE = "circle"
    SQUARE = "square"
    TRIANGLE = "triangle"
    SPIRAL = "spiral"
    STAR = "star"


@dataclass(frozen=True)
class SliderTrial:
    target_value: float
    start_value: float = 0.0
    length: float = SLIDER_LENGTH_M

    def value_to_position(self, value: float) -> tuple[float, float, float]:
        return (value * self.length, 0.0, 0.0)

    def start_position(self) -> tuple[float, float, float]:
        return self.value_to_position(self.start_value)

    def target_position(self) -> tuple[float, float, float]:
        return self.value_to_position(self.target_value)

    def to_json(self) -> dict:
        return {
            "kind": "slider",
            "length": self.length,
            "start_value": self.start_value,
            "target_value": self.target_value,
        }


@dataclass(frozen=True)
class TracePath:
    shape: Shape
    polyline: tuple[tuple[float, float], ...]
    closed: bool

    def start_position(self) -> tuple[float, float, float]:
        x, y = self.polyline[0]
        return (x, y, 0.0)

    def target_position(self) -> None:
        return None

    def to_json(self) -> dict:
        return {"kind": "trace", "shape": self.shape.value}


@dataclass(frozen=True)
class PlacementTrial:
    target_pos: tuple[float, float, float]
    object_start: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def start_position(self) -> tuple[float, float, float]:
        return self.object_start

    def target_position(self) -> tuple[float, float, float]:
        return self.target_pos

    def to_json(self) -> dict:
        return {
            "kind": "placement",
            "object_start": list(self.object_start),
            "target_pos": list(self.target_pos),
        }


def make_slider_trial(seed: int) -> SliderTrial:
    rng = np.random.default_rng(seed)
    lo, hi = SLIDER_TARGET_RANGE
    return SliderTrial(target_value=float(rng.uniform(lo, hi)))


def _close(points: list[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    return tuple(points + [points[0]])


def make_trace_path(shape: Shape | str) -> TracePath:
    shape = Shape(shape)
    r = _HALF_EXTENT
    if shape is Shape.CIRCLE:
        theta = np.linspace(0.0, 2.0 * math.pi, SMOOTH_SHAPE_VERTICES, endpoint=False)
        pts = [(float(r * math.cos(a)), float(r * math.sin(a))) for a in theta]
        return TracePath(shape, _close(pts), closed=True)
    if shape is Shape.SQUARE:
        pts = [(-r, -r), (r, -r), (r, r), (-r, r)]
        return TracePath(shape, _close(pts), closed=True)
    if shape is Shape.TRIANGLE:
        # Equilateral, apex up, side 2r so the base spans the padded bounds.
        base_y = r - 2.0 * r * math.sqrt(3.0) / 2.0
        pts = [(0.0, r), (-r, base_y), (r, base_y)]
        return TracePath(shape, _close(pts), closed=True)
    if shape is Shape.SPIRAL:
        total = SPIRAL_TURNS * 2.0 * math.pi
        theta = np.linspace(0.0, total, SMOOTH_SHAPE_VERTICES)
        pts = [
            (float(r * a / total * math.cos(a)), float(r * a / total * math.sin(a)))
            for a in theta
        ]
        return TracePath(shape, tuple(pts), closed=False)
    # Five-point star, first point up, alternating outer/inner radius.
    pts = []
    for k in range(2 * STAR_POINTS):
        radius = r if k % 2 == 0 else r * STAR_INNER_RATIO
        angle = math.pi / 2.0 - k * math.pi / STAR_POINTS
        pts.append((float(radius * math.cos(angle)), float(radius * math.sin(angle))))
    return TracePath(shape, _close(pts), closed=True)


def make_placement_trial(seed: int) -> PlacementTrial:
    rng = np.random.default_rng(seed)
    lo, hi = PLACEMENT_DISTANCE_RANGE
    radius = float(rng.uniform(lo, hi))
    direction = rng.normal(size=3)
    norm = float(np.linalg.norm(direction))
    while norm < 1e-12:
        direction = rng.normal(size=3)
        norm = float(np.linalg.norm(direction))
    direction = direction / norm
    target = tuple(float(radius * v) for v in direction)
    return PlacementTrial(target_pos=target)


def task_from_json(data: dict):
    kind = data.get("kind")
    if kind == "slider":
        return SliderTrial(
            target_value=data["target_value"],
            start_value=data.get("start_value", 0.0),
            length=data.get("length", SLIDER_LENGTH_M),
        )
    if kind == "trace":
        return make_trace_path(data["shape"])
    if kind == "placement":
        return PlacementTrial(
            target_pos=tuple(data["target_pos"]),
            object_start=tuple(data.get("object_start", (0.0, 0.0, 0.0))),
        )
    raise ValueError(f"unknown task kind: {kind!r}")


def make_task(kind: str, seed: int = 0, shape: Shape | str = Shape.CIRCLE):
    if kind == "slider":
        return make_slider_trial(seed)
    if kind == "trace":
        return make_trace_path(shape)
    if kind == "placement":
        return make_placement_trial(seed)
    raise ValueError(f"unknown task kind: {kind!r}")
