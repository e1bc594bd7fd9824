"""Per-user force calibration.

A calibration stream holds a user pinching at three comfortable levels
(light, moderate, hard). 1-D k-means recovers the three characteristic
raw-force levels; the profile then maps raw force onto the tracking-speed
range so that the light level gives the fastest speed, the moderate level
the base gain, and the hard level the slowest speed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateClusters, InsufficientData
from .hermite import MonotoneCubic
from .mapping import FORCE_SPEED_ANCHORS

MIN_STREAM_SAMPLES = 30
CENTROID_TOLERANCE = 1e-6
_KMEANS_MAX_ITER = 100


@dataclass(frozen=True)
class ForceSample:
    t: float  # seconds, nondecreasing within a stream
    raw: float  # sensor units, nonnegative


def _raw_values(stream: Iterable) -> np.ndarray:
    vals = [s.raw if isinstance(s, ForceSample) else float(s) for s in stream]
    return np.asarray(vals, dtype=float)


def kmeans_objective(values: np.ndarray, centroids: Sequence[float]) -> float:
    """Sum of squared distances from each value to its nearest centroid."""
    c = np.asarray(centroids, dtype=float)
    d2 = (values[:, None] - c[None, :]) ** 2
    return float(d2.min(axis=1).sum())


def initial_centroids(values: np.ndarray) -> np.ndarray:
    """Deterministic k-means seeds: the 1/6, 3/6, 5/6 quantiles."""
    return np.quantile(np.sort(values), [1.0 / 6.0, 3.0 / 6.0, 5.0 / 6.0])


def cluster_force_levels(stream: Iterable) -> tuple[float, float, float]:
    """Recover the three characteristic force levels from a raw stream.

    Runs 1-D k-means (k=3) from quantile seeds to a fixed point, which makes
    the result deterministic and independent of sample order.
    """
    values = _raw_values(stream)
    if np.unique(values).size < 3:
        raise DegenerateClusters("need at least 3 distinct force values")
    if values.size < MIN_STREAM_SAMPLES:
        raise InsufficientData(
            f"need at least {MIN_STREAM_SAMPLES} samples, got {values.size}"
        )

    values = np.sort(values)
    centroids = initial_centroids(values)
    for _ in range(_KMEANS_MAX_ITER):
        assign = np.abs(values[:, None] - centroids[None, :]).argmin(axis=1)
        new = centroids.copy()
        for k in range(3):
            members = values[assign == k]
            if members.size:
                new[k] = members.mean()
        if np.array_equal(new, centroids):
            break
        centroids = new

    centroids = np.sort(centroids)
    if np.any(np.diff(centroids) < CENTROID_TOLERANCE):
        raise DegenerateClusters("force levels are not separable")
    return float(centroids[0]), float(centroids[1]), float(centroids[2])


@dataclass(frozen=True)
class CalibrationProfile:
    """Raw-force anchors plus the monotone raw-force -> speed curve.

    Raw force is first normalized piecewise-linearly (f_min -> 0,
    f_mid -> 0.5, f_max -> 1), then pushed through the fixed normalized
    anchor spline and scaled by the base gain. Forces outside the calibrated
    range clamp to the nearest boundary speed.
    """

    f_min: float
    f_mid: float
    f_max: float
    base_gain_c: float = 1.0
    anchors_norm: tuple[tuple[float, float], ...] = FORCE_SPEED_ANCHORS

    def __post_init__(self):
        if not (self.f_min < self.f_mid < self.f_max):
            raise ValueError("anchors must be strictly increasing")
        if self.base_gain_c <= 0:
            raise ValueError("base gain c must be positive")

    @cached_property
    def multiplier_curve(self) -> MonotoneCubic:
        xs = [a[0] for a in self.anchors_norm]
        ys = [a[1] for a in self.anchors_norm]
        return MonotoneCubic(xs, ys)

    def normalize(self, raw):
        """Raw sensor units -> normalized force in [0, 1]."""
        if isinstance(raw, (int, float)):
            raw = float(raw)
            if raw <= self.f_mid:
                u = (raw - self.f_min) / (self.f_mid - self.f_min) * 0.5
            else:
                u = 0.5 + (raw - self.f_mid) / (self.f_max - self.f_mid) * 0.5
            return min(1.0, max(0.0, u))
        raw = np.asarray(raw, dtype=float)
        lower = (raw - self.f_min) / (self.f_mid - self.f_min) * 0.5
        upper = 0.5 + (raw - self.f_mid) / (self.f_max - self.f_mid) * 0.5
        return np.clip(np.where(raw <= self.f_mid, lower, upper), 0.0, 1.0)

    def speed(self, raw):
        return self.base_gain_c * self.multiplier_curve(self.normalize(raw))

    def with_gain(self, c: float) -> "CalibrationProfile":
        return CalibrationProfile(self.f_min, self.f_mid, self.f_max, c, self.anchors_norm)

    def to_json(self) -> dict:
        curve = self.multiplier_curve
        return {
            "f_min": self.f_min,
            "f_mid": self.f_mid,
            "f_max": self.f_max,
            "c": self.base_gain_c,
            "anchors_norm": [list(a) for a in self.anchors_norm],
            "tangents": [self.base_gain_c * m for m in curve.tangents.tolist()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CalibrationProfile":
        anchors = tuple(tuple(a) for a in data.get("anchors_norm", FORCE_SPEED_ANCHORS))
        return cls(data["f_min"], data["f_mid"], data["f_max"], data.get("c", 1.0), anchors)

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def identity_profile(c: float = 1.0) -> CalibrationProfile:
    """Profile whose raw units are already normalized force in [0, 1]."""
    return CalibrationProfile(0.0, 0.5, 1.0, c)


def build_force_mapping(
    anchors: tuple[float, float, float], c: float = 1.0
) -> CalibrationProfile:
    """Build a profile whose curve hits the fastest / base / slowest speeds
    exactly at the three recovered force levels."""
    f_min, f_mid, f_max = anchors
    if f_min >= f_mid or f_mid >= f_max:
        raise ValueError("anchors must be strictly increasing")
    if (f_mid - f_min) < CENTROID_TOLERANCE or (f_max - f_mid) < CENTROID_TOLERANCE:
        raise DegenerateClusters("force anchors are too close together")
    return CalibrationProfile(f_min, f_mid, f_max, c)


def eval_curve(profile: CalibrationProfile, raw) -> float:
    """Speed for a raw sensor value; clamps outside the calibrated range."""
    return profile.speed(raw)


def load_profile(path) -> CalibrationProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return CalibrationProfile.from_json(json.load(fh))


def save_profile(profile: CalibrationProfile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
