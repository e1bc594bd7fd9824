"""Tracking-speed functions for the four interaction techniques.

Tracking speed s is the control-display gain: pointer meters per hand
meter. Every technique scales a base gain c:

  constant    s = c
  gogo        s rises linearly with hand displacement from the grab anchor
  prism       s rises linearly with hand velocity
  forcepinch  s falls with normalized pinch force, through fixed anchors

All functions here are pure; session state (anchors, velocity windows)
lives in the engine module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .hermite import MonotoneCubic


class Technique(str, Enum):
    CONSTANT = "constant"
    GOGO = "gogo"
    PRISM = "prism"
    FORCEPINCH = "forcepinch"


# (normalized force, speed as a multiple of c): no force = fastest, full
# force = slowest. The middle anchor pins moderate force to the base gain.
FORCE_SPEED_ANCHORS: tuple[tuple[float, float], ...] = ((0.0, 4.0), (0.5, 1.0), (1.0, 0.25))


@dataclass(frozen=True)
class GoGoParams:
    d_flat: float = 0.1  # meters: constant-speed phase below this displacement
    d_max: float = 0.5  # meters: displacement where the maximum multiple is reached
    s_max_mult: float = 4.0


@dataclass(frozen=True)
class PrismParams:
    v_max: float = 0.75  # m/s: velocity where the maximum multiple is reached
    s_min_mult: float = 0.25
    s_max_mult: float = 4.0


@dataclass(frozen=True)
class ForcePinchParams:
    anchors_norm: tuple[tuple[float, float], ...] = FORCE_SPEED_ANCHORS


@dataclass(frozen=True)
class CursorParams:
    r_min: float = 0.005  # meters, dot radius at the slowest speed
    r_max: float = 0.02  # meters, dot radius at the fastest speed


@dataclass(frozen=True)
class TechniqueConfig:
    technique: Technique
    base_gain_c: float = 1.0
    gogo: GoGoParams = field(default_factory=GoGoParams)
    prism: PrismParams = field(default_factory=PrismParams)
    forcepinch: ForcePinchParams = field(default_factory=ForcePinchParams)
    cursor: CursorParams = field(default_factory=CursorParams)
    # None: rollback on release only for the force-responsive technique.
    rollback_enabled: bool | None = None
    # Optional raw-force gate for pinch activation; None disables it.
    min_engage_force: float | None = None

    def __post_init__(self):
        if self.base_gain_c <= 0:
            raise ValueError("base gain c must be positive")
        if not self.gogo.d_flat < self.gogo.d_max:
            raise ValueError("gogo d_flat must be below d_max")
        if self.prism.v_max <= 0:
            raise ValueError("prism v_max must be positive")
        if not self.prism.s_min_mult < 1.0 < self.prism.s_max_mult:
            raise ValueError("prism multiples must bracket 1")
        anchors = self.forcepinch.anchors_norm
        xs = [a[0] for a in anchors]
        ys = [a[1] for a in anchors]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("force anchors must have strictly increasing abscissae")
        if any(b >= a for a, b in zip(ys, ys[1:])):
            raise ValueError("force anchors must have strictly decreasing ordinates")
        if xs[0] < 0.0 or xs[-1] > 1.0:
            raise ValueError("force anchors live on the normalized [0, 1] range")

    @property
    def rollback_active(self) -> bool:
        if self.rollback_enabled is None:
            return self.technique is Technique.FORCEPINCH
        return self.rollback_enabled


@lru_cache(maxsize=16)
def _multiplier_curve(anchors: tuple[tuple[float, float], ...]) -> MonotoneCubic:
    xs = [a[0] for a in anchors]
    ys = [a[1] for a in anchors]
    return MonotoneCubic(xs, ys)


def force_multiplier_curve(cfg: TechniqueConfig) -> MonotoneCubic:
    """Normalized force -> speed multiple (independent of c)."""
    return _multiplier_curve(cfg.forcepinch.anchors_norm)


def eval_constant(cfg: TechniqueConfig) -> float:
    return cfg.base_gain_c


def eval_gogo(d: float, cfg: TechniqueConfig) -> float:
    """Speed for a hand displacement d (meters) from the grab anchor."""
    if d < 0:
        raise ValueError("displacement must be nonnegative")
    c = cfg.base_gain_c
    p = cfg.gogo
    if d < p.d_flat:
        return c
    if d >= p.d_max:
        return p.s_max_mult * c
    frac = (d - p.d_flat) / (p.d_max - p.d_flat)
    return c + frac * (p.s_max_mult - 1.0) * c


def eval_prism(v: float, cfg: TechniqueConfig) -> float:
    """Speed for an estimated hand velocity v (m/s)."""
    if v < 0:
        raise ValueError("velocity must be nonnegative")
    c = cfg.base_gain_c
    p = cfg.prism
    if v >= p.v_max:
        return p.s_max_mult * c
    frac = v / p.v_max
    return (p.s_min_mult + frac * (p.s_max_mult - p.s_min_mult)) * c


def eval_forcepinch(f_norm: float, cfg: TechniqueConfig) -> float:
    """Speed for a normalized pinch force; out-of-range forces are clamped."""
    curve = force_multiplier_curve(cfg)
    return cfg.base_gain_c * curve(f_norm)


def eval_technique(cfg: TechniqueConfig, x: float = 0.0) -> float:
    """Dispatch on cfg.technique; x is the technique's scalar input."""
    if cfg.technique is Technique.CONSTANT:
        return eval_constant(cfg)
    if cfg.technique is Technique.GOGO:
        return eval_gogo(x, cfg)
    if cfg.technique is Technique.PRISM:
        return eval_prism(x, cfg)
    return eval_forcepinch(x, cfg)


def speed_bounds(cfg: TechniqueConfig) -> tuple[float, float]:
    """Closed [min, max] speed range the technique can produce."""
    c = cfg.base_gain_c
    if cfg.technique is Technique.CONSTANT:
        return c, c
    if cfg.technique is Technique.GOGO:
        return c, cfg.gogo.s_max_mult * c
    if cfg.technique is Technique.PRISM:
        return cfg.prism.s_min_mult * c, cfg.prism.s_max_mult * c
    anchors = cfg.forcepinch.anchors_norm
    return anchors[-1][1] * c, anchors[0][1] * c


def cursor_radius(speed: float, cfg: TechniqueConfig) -> float:
    """Feedback-dot radius for a speed value.

    The 16x speed envelope is perceptually multiplicative, so the radius is
    linear in log(speed) across the full [lowest, highest] multiple range.
    The constant technique pins the dot at the radius of its fixed speed c.
    """
    c = cfg.base_gain_c
    anchors = cfg.forcepinch.anchors_norm
    lo = anchors[-1][1] * c
    hi = anchors[0][1] * c
    if cfg.technique is Technique.CONSTANT:
        speed = c
    u = math.log(speed / lo) / math.log(hi / lo)
    u = min(1.0, max(0.0, u))
    return cfg.cursor.r_min + u * (cfg.cursor.r_max - cfg.cursor.r_min)
