"""Per-trial performance measures computed from trial logs.

A trial spans the first selection to the final deselection. Measures:
final/path error distance, operation time, number of pinch cycles, hand
and object travel distances, overshoot count (entries past 110% of the
intended distance), and time-at-position / tracking-speed histograms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import DegenerateTrial, EmptySamples, InsufficientData, NoOperations, OutOfRange
from .tasks import TracePath

OVERSHOOT_MARGIN = 1.10  # progress beyond target, as a fraction of intended distance

SPEED_HIST_BINS = 16
POSITION_HIST_BINS = 24
POSITION_HIST_MAX_PROGRESS = 1.2  # progress fraction axis: 0 = start, 1 = target
TRACE_DIST_HIST_MAX_M = 0.1

TLX_RAW_RANGE = (0.0, 20.0)
TLX_SCALE_RANGE = (1.0, 7.0)


def error_final(final_pos: Sequence[float], target_pos: Sequence[float]) -> float:
    """Euclidean distance between the object's final position and the target."""
    final = np.asarray(final_pos, dtype=float)
    target = np.asarray(target_pos, dtype=float)
    if final.shape != target.shape:
        raise ValueError("positions must have the same dimensionality")
    return float(np.linalg.norm(final - target))


def _polyline_min_distances(points: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Per-point distance to the nearest point on any polyline segment."""
    a = polyline[:-1]
    b = polyline[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    safe = np.where(denom == 0.0, 1.0, denom)
    out = np.empty(len(points))
    # Chunked so the (chunk, segments, 2) intermediate stays small.
    for lo in range(0, len(points), 512):
        p = points[lo : lo + 512]
        ap = p[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("psj,sj->ps", ap, ab) / safe, 0.0, 1.0)
        t = np.where(denom == 0.0, 0.0, t)
        closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
        d = np.linalg.norm(p[:, None, :] - closest, axis=2)
        out[lo : lo + 512] = d.min(axis=1)
    return out


def error_path(samples: Sequence[Sequence[float]], path: TracePath, aggregate: str = "median") -> float:
    """Aggregate distance from sampled stroke points to the target path."""
    pts = np.asarray(samples, dtype=float)
    if pts.size == 0:
        raise EmptySamples("path error needs at least one sample")
    if pts.ndim == 1:
        pts = pts[None, :]
    dists = _polyline_min_distances(pts[:, :2], np.asarray(path.polyline, dtype=float))
    if aggregate == "median":
        return float(np.median(dists))
    if aggregate == "mean":
        return float(np.mean(dists))
    raise ValueError(f"unknown aggregate: {aggregate!r}")


def pinch_cycles(records) -> list[tuple[float, float]]:
    """(rise time, fall time) per cycle; a trailing open pinch closes at log end."""
    cycles: list[tuple[float, float]] = []
    rise_t: float | None = None
    prev = False
    for rec in records:
        if rec.pinching and not prev:
            rise_t = rec.t
        elif not rec.pinching and prev and rise_t is not None:
            cycles.append((rise_t, rec.t))
            rise_t = None
        prev = rec.pinching
    if rise_t is not None and records:
        cycles.append((rise_t, records[-1].t))
    return cycles


def count_operations(records) -> int:
    return len(pinch_cycles(records))


def operation_time(records) -> float:
    """Seconds from the first selection to the final deselection."""
    cycles = pinch_cycles(records)
    if not cycles:
        raise NoOperations("log contains no pinch cycle")
    return cycles[-1][1] - cycles[0][0]


def travel_distance(points: Sequence[Sequence[float]]) -> float:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if len(pts) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


def count_overshoots(
    positions, start: Sequence[float], target: Sequence[float]
) -> int:
    """Entries into the region beyond 110% of the start-to-target distance.

    Progress is measured along the start->target axis; each rising edge into
    the overshoot region counts once.
    """
    start_v = np.atleast_1d(np.asarray(start, dtype=float))
    target_v = np.atleast_1d(np.asarray(target, dtype=float))
    intended = float(np.linalg.norm(target_v - start_v))
    if intended == 0.0:
        raise DegenerateTrial("start and target coincide")
    axis = (target_v - start_v) / intended
    pts = [getattr(p, "object_pos", p) for p in positions]
    pos = np.atleast_2d(np.asarray(pts, dtype=float))
    progress = (pos - start_v[None, :]) @ axis
    threshold = intended * OVERSHOOT_MARGIN
    inside = progress > threshold
    return int(np.count_nonzero(inside[1:] & ~inside[:-1]) + (1 if inside.size and inside[0] else 0))


def histogram(values: Sequence[float], bin_edges: Sequence[float]) -> np.ndarray:
    """Counts per half-open bin [e_i, e_i+1); the last bin is closed."""
    edges = np.asarray(bin_edges, dtype=float)
    if np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing")
    counts, _ = np.histogram(np.asarray(values, dtype=float), bins=edges)
    return counts


def mean_ci95(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and Student-t 95% half-width (desk-scale CI surrogate)."""
    vals = np.asarray(values, dtype=float)
    if vals.size < 2:
        raise InsufficientData("confidence interval needs at least 2 values")
    mean = float(vals.mean())
    sem = float(vals.std(ddof=1)) / math.sqrt(vals.size)
    half = float(stats.t.ppf(0.975, vals.size - 1)) * sem
    return mean, half


def rescale_tlx(x: float) -> float:
    """Proportional rescale of a raw 0-20 workload score onto 1-7."""
    lo, hi = TLX_RAW_RANGE
    if not (lo <= x <= hi):
        raise OutOfRange(f"raw score {x} outside [{lo}, {hi}]")
    out_lo, out_hi = TLX_SCALE_RANGE
    return out_lo + x * (out_hi - out_lo) / (hi - lo)


@dataclass(frozen=True)
class TrialMetrics:
    error_distance: float
    operation_time: float
    num_operations: int
    hand_travel: float
    object_travel: float
    overshoot_count: int
    speed_histogram: dict = field(default_factory=dict)
    position_histogram: dict = field(default_factory=dict)
    error_path_mean: float | None = None  # alternative aggregate, trace only

    def to_json(self) -> dict:
        return {
            "error_distance": self.error_distance,
            "operation_time": self.operation_time,
            "num_operations": self.num_operations,
            "hand_travel": self.hand_travel,
            "object_travel": self.object_travel,
            "overshoot_count": self.overshoot_count,
            "speed_histogram": self.speed_histogram,
            "position_histogram": self.position_histogram,
            "error_path_mean": self.error_path_mean,
        }


def _hist_dict(values: np.ndarray, edges: np.ndarray) -> dict:
    clipped = np.clip(values, edges[0], edges[-1]) if values.size else values
    counts = histogram(clipped, edges)
    return {"edges": edges.tolist(), "counts": counts.tolist()}


def compute_trial_metrics(task, records, c: float = 1.0) -> TrialMetrics:
    """All per-trial measures from a task definition and its tick records."""
    if not records:
        raise EmptySamples("trial log has no records")
    cycles = pinch_cycles(records)
    if not cycles:
        raise NoOperations("trial log has no pinch cycle")
    num_ops = len(cycles)
    op_time = cycles[-1][1] - cycles[0][0]

    first_rise, last_fall = cycles[0][0], cycles[-1][1]
    window = [r for r in records if first_rise <= r.t <= last_fall]
    hand_travel = travel_distance([r.hand_pos for r in window])
    object_travel = travel_distance([r.object_pos for r in window])

    pinched = [r for r in records if r.pinching]
    speeds = np.asarray([r.speed for r in pinched], dtype=float)
    lo_mult, hi_mult = 0.25, 4.0
    speed_edges = np.geomspace(lo_mult * c, hi_mult * c, SPEED_HIST_BINS + 1)
    speed_hist = _hist_dict(speeds, speed_edges)

    final_pos = records[-1].object_pos
    error_path_mean = None
    if isinstance(task, TracePath):
        stroke = [(r.object_pos[0], r.object_pos[1]) for r in pinched]
        error = error_path(stroke, task)
        error_path_mean = error_path(stroke, task, aggregate="mean")
        overshoots = 0
        dists = _polyline_min_distances(
            np.asarray(stroke, dtype=float), np.asarray(task.polyline, dtype=float)
        )
        pos_edges = np.linspace(0.0, TRACE_DIST_HIST_MAX_M, POSITION_HIST_BINS + 1)
        position_hist = _hist_dict(dists, pos_edges)
    else:
        start = np.asarray(task.start_position(), dtype=float)
        target = np.asarray(task.target_position(), dtype=float)
        error = error_final(final_pos, target)
        overshoots = count_overshoots(records, start, target)
        intended = float(np.linalg.norm(target - start))
        axis = (target - start) / intended
        pinched_pos = np.asarray([r.object_pos for r in pinched], dtype=float)
        progress = ((pinched_pos - start[None, :]) @ axis) / intended
        pos_edges = np.linspace(0.0, POSITION_HIST_MAX_PROGRESS, POSITION_HIST_BINS + 1)
        position_hist = _hist_dict(progress, pos_edges)

    return TrialMetrics(
        error_distance=error,
        operation_time=op_time,
        num_operations=num_ops,
        hand_travel=hand_travel,
        object_travel=object_travel,
        overshoot_count=overshoots,
        speed_histogram=speed_hist,
        position_histogram=position_hist,
        error_path_mean=error_path_mean,
    )


CSV_COLUMNS = [
    "technique",
    "task",
    "seed",
    "error_distance",
    "operation_time",
    "num_operations",
    "hand_travel",
    "object_travel",
    "overshoot_count",
    "error_path_mean",
]


def metrics_csv_row(technique: str, task_kind: str, seed, m: TrialMetrics) -> list[str]:
    return [
        technique,
        task_kind,
        "" if seed is None else str(seed),
        repr(m.error_distance),
        repr(m.operation_time),
        str(m.num_operations),
        repr(m.hand_travel),
        repr(m.object_travel),
        str(m.overshoot_count),
        "" if m.error_path_mean is None else repr(m.error_path_mean),
    ]
