"""Seeded synthetic input streams.

Generates plausible hand+force traces at 100 Hz so the engine and metrics
can be exercised without human subjects. Hand motion follows minimum-jerk
segments between waypoints plus per-tick Gaussian tremor; pinch force
follows one of three strategies observed in practice: holding a heavy
pinch throughout, modulating force with path curvature, or going light in
transit and heavy on approach.

The task planner composes grab / release / return phases, clutching when a
single grab's reach cannot cover the remaining distance. It aims each grab
with a noise-free forward model that replicates the engine's tick rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .calibration import CalibrationProfile, identity_profile
from .engine import ROLLBACK_WINDOW_S, TICK_PERIOD_S, VELOCITY_WINDOW_S, InputSample
from .mapping import Technique, TechniqueConfig, eval_prism
from .tasks import PlacementTrial, SliderTrial, TracePath

Vec3 = tuple[float, float, float]

DYNAMIC_TURN_WINDOW_S = 0.1
DYNAMIC_TURN_THRESHOLD_DEG = 10.0
HEAVY_TAIL_FRACTION = 0.8  # light-then-heavy: heavy for the last 20% of a segment
_MIN_JERK_PEAK_FACTOR = 1.875  # peak velocity of a unit min-jerk segment per unit time
_STATIONARY_EPS = 1e-9


class ForceStrategy(str, Enum):
    CONSTANT_HEAVY = "constant-heavy"
    DYNAMIC_MODULATION = "dynamic"
    LIGHT_THEN_HEAVY = "light-then-heavy"


@dataclass(frozen=True)
class MotionPlan:
    waypoints: tuple[Vec3, ...]
    segment_durations: tuple[float, ...]
    strategy: ForceStrategy = ForceStrategy.CONSTANT_HEAVY

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("plan needs at least two waypoints")
        if len(self.segment_durations) != len(self.waypoints) - 1:
            raise ValueError("need one duration per segment")
        if any(d <= 0 for d in self.segment_durations):
            raise ValueError("segment durations must be positive")


@dataclass(frozen=True)
class NoiseModel:
    tremor_amplitude: float = 0.0005  # meters, per-tick std-dev in hand space
    seed: int = 0

    def __post_init__(self):
        if self.tremor_amplitude < 0:
            raise ValueError("tremor amplitude must be nonnegative")


def min_jerk(x0, x1, T: float, t: float):
    """Minimum-jerk position between x0 and x1 at time t of a T-second move."""
    if not 0.0 <= t <= T:
        raise ValueError(f"t={t} outside [0, {T}]")
    tau = t / T
    s = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau))
    a = np.asarray(x0, dtype=float)
    b = np.asarray(x1, dtype=float)
    out = a + (b - a) * s
    return float(out) if out.ndim == 0 else tuple(out.tolist())


def _minjerk_fractions(tau: np.ndarray) -> np.ndarray:
    return tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau))


def _plan_positions(plan: MotionPlan, local_t: np.ndarray) -> np.ndarray:
    """Nominal hand positions along the plan at local times in [0, total]."""
    durations = np.asarray(plan.segment_durations, dtype=float)
    bounds = np.concatenate(([0.0], np.cumsum(durations)))
    seg = np.clip(np.searchsorted(bounds, local_t, side="right") - 1, 0, len(durations) - 1)
    tau = np.clip((local_t - bounds[seg]) / durations[seg], 0.0, 1.0)
    frac = _minjerk_fractions(tau)
    w = np.asarray(plan.waypoints, dtype=float)
    a = w[seg]
    return a + frac[:, None] * (w[seg + 1] - a)


def _turning_heavy_mask(positions: np.ndarray) -> np.ndarray:
    """Ticks where the nominal path is turning (or too slow to tell)."""
    n = len(positions)
    lag = max(1, int(round(DYNAMIC_TURN_WINDOW_S / TICK_PERIOD_S)))
    idx = np.arange(n)
    i1 = np.maximum(idx - lag, 0)
    i0 = np.maximum(idx - 2 * lag, 0)
    d1 = positions - positions[i1]
    d0 = positions[i1] - positions[i0]
    n1 = np.linalg.norm(d1, axis=1)
    n0 = np.linalg.norm(d0, axis=1)
    degenerate = (n1 < _STATIONARY_EPS) | (n0 < _STATIONARY_EPS)
    cosang = np.ones(n)
    ok = ~degenerate
    cosang[ok] = np.einsum("ij,ij->i", d1[ok], d0[ok]) / (n1[ok] * n0[ok])
    angle = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
    return degenerate | (angle > DYNAMIC_TURN_THRESHOLD_DEG)


def _force_series(plan: MotionPlan, strategy: ForceStrategy, local_t: np.ndarray,
                  positions: np.ndarray, f_light: float, f_heavy: float) -> np.ndarray:
    if strategy is ForceStrategy.CONSTANT_HEAVY:
        return np.full(len(local_t), f_heavy)
    if strategy is ForceStrategy.LIGHT_THEN_HEAVY:
        durations = np.asarray(plan.segment_durations, dtype=float)
        bounds = np.concatenate(([0.0], np.cumsum(durations)))
        seg = np.clip(np.searchsorted(bounds, local_t, side="right") - 1, 0, len(durations) - 1)
        tau = np.clip((local_t - bounds[seg]) / durations[seg], 0.0, 1.0)
        return np.where(tau >= HEAVY_TAIL_FRACTION, f_heavy, f_light)
    heavy = _turning_heavy_mask(positions)
    return np.where(heavy, f_heavy, f_light)


def gen_input_stream(
    plan: MotionPlan,
    force_strategy: ForceStrategy | None = None,
    noise: NoiseModel | None = None,
    profile: CalibrationProfile | None = None,
    *,
    start_tick: int = 0,
    final_release: bool = True,
    rng: np.random.Generator | None = None,
) -> list[InputSample]:
    """Pinched 100 Hz samples tracing the plan, plus an optional release tick.

    Timestamps are start_tick*0.01 onward so streams can be spliced on a
    shared clock. The force strategy reads the noise-free trajectory; tremor
    only perturbs the emitted hand positions.
    """
    strategy = force_strategy or plan.strategy
    noise = noise or NoiseModel(tremor_amplitude=0.0)
    profile = profile or identity_profile()
    if rng is None:
        rng = np.random.default_rng(noise.seed)

    total = float(sum(plan.segment_durations))
    ticks = int(round(total / TICK_PERIOD_S))
    local_t = np.arange(ticks + 1) * TICK_PERIOD_S
    positions = _plan_positions(plan, local_t)
    forces = _force_series(plan, strategy, local_t, positions, profile.f_min, profile.f_max)

    emitted = positions
    if noise.tremor_amplitude > 0.0:
        emitted = positions + rng.normal(0.0, noise.tremor_amplitude, positions.shape)

    samples = []
    for j in range(ticks + 1):
        t = (start_tick + j) * TICK_PERIOD_S
        p = emitted[j]
        samples.append(InputSample(t, (p[0], p[1], p[2]), float(forces[j]), True))
    if final_release:
        t = (start_tick + ticks + 1) * TICK_PERIOD_S
        last = samples[-1]
        samples.append(InputSample(t, last.hand_pos, last.raw_force, False))
    return samples


def _idle_samples(start_tick: int, count: int, pos: Vec3, noise: NoiseModel,
                  rng: np.random.Generator) -> list[InputSample]:
    base = np.asarray(pos, dtype=float)
    jitter = (
        rng.normal(0.0, noise.tremor_amplitude, (count, 3))
        if noise.tremor_amplitude > 0.0
        else np.zeros((count, 3))
    )
    return [
        InputSample(
            (start_tick + j) * TICK_PERIOD_S,
            tuple((base + jitter[j]).tolist()),
            0.0,
            False,
        )
        for j in range(count)
    ]


# --- noise-free forward model of one grab -------------------------------

def _grab_profile(x: float, user: "UserParams") -> tuple[int, float]:
    """Tick count and duration of a grab segment of hand length x."""
    duration = max(user.min_grab_duration, _MIN_JERK_PEAK_FACTOR * x / user.transit_peak_speed)
    ticks = max(2, int(round(duration / TICK_PERIOD_S)))
    return ticks, ticks * TICK_PERIOD_S


def _rollback_displacement(
    cumdisp: np.ndarray, forces: np.ndarray, start_tick: int, ticks: int
) -> float:
    """Displacement after the release rollback: the peak-force tick (latest
    tie) within 0.2 s of the release tick wins."""
    t_release = (start_tick + ticks + 1) * TICK_PERIOD_S
    tick_t = (start_tick + np.arange(ticks + 1)) * TICK_PERIOD_S
    window = np.nonzero(tick_t >= t_release - ROLLBACK_WINDOW_S - 1e-9)[0]
    best = window[0]
    for j in window:
        if forces[j] >= forces[best]:
            best = j
    return float(cumdisp[best])


def grab_displacement(
    x: float,
    cfg: TechniqueConfig,
    profile: CalibrationProfile | None,
    strategy: ForceStrategy,
    user: "UserParams",
    start_tick: int = 0,
) -> float:
    """Object displacement the engine produces for a straight pinched grab
    of hand length x, assuming a stationary hand for >= 0.2 s beforehand.

    Replicates the engine's tick rules on the nominal trajectory: movement
    applies between consecutive pinched ticks, the velocity window spans the
    trailing 0.1 s, the grab anchor sits at the segment start, and the
    release rollback (when active) reverts to the peak-force tick.
    """
    if x <= 0.0:
        return 0.0
    c = cfg.base_gain_c
    if cfg.technique is Technique.CONSTANT:
        # Rollback, if enabled, ties on constant force and keeps the end.
        return c * x

    ticks, duration = _grab_profile(x, user)
    tau = np.arange(ticks + 1) / ticks
    p = x * _minjerk_fractions(tau)  # scalar progress along the grab direction
    deltas = np.diff(p)

    if cfg.technique is Technique.GOGO:
        g = cfg.gogo
        d = p[1:]  # displacement from the anchor at each moving tick
        frac = np.clip((d - g.d_flat) / (g.d_max - g.d_flat), 0.0, 1.0)
        speeds = np.where(d < g.d_flat, c, c + frac * (g.s_max_mult - 1.0) * c)
        return float(np.sum(deltas * speeds))
    if cfg.technique is Technique.PRISM:
        pr = cfg.prism
        lag = int(round(VELOCITY_WINDOW_S / TICK_PERIOD_S))
        idx = np.arange(1, ticks + 1)
        # The window reaches into the stationary pre-grab ticks for idx < lag:
        # position there is the grab start, time keeps the master clock.
        back_pos = np.maximum(idx - lag, 0)
        t_hi = (start_tick + idx) * TICK_PERIOD_S
        t_lo = (start_tick + idx - lag) * TICK_PERIOD_S
        v = np.abs(p[idx] - p[back_pos]) / (t_hi - t_lo)
        frac = np.clip(v / pr.v_max, 0.0, 1.0)
        speeds = (pr.s_min_mult + frac * (pr.s_max_mult - pr.s_min_mult)) * c
        return float(np.sum(deltas * speeds))

    if profile is None:
        profile = identity_profile(c)
    if strategy is ForceStrategy.CONSTANT_HEAVY:
        # Constant force: rollback ties resolve to the release-adjacent tick.
        return float(profile.speed(profile.f_max)) * x
    local_t = np.arange(ticks + 1) * TICK_PERIOD_S
    plan = MotionPlan(((0.0, 0.0, 0.0), (x, 0.0, 0.0)), (duration,), strategy)
    positions = np.column_stack([p, np.zeros_like(p), np.zeros_like(p)])
    forces = _force_series(plan, strategy, local_t, positions, profile.f_min, profile.f_max)
    speeds = profile.speed(forces[1:])
    cumdisp = np.concatenate(([0.0], np.cumsum(deltas * speeds)))
    if cfg.rollback_active:
        return _rollback_displacement(cumdisp, forces, start_tick, ticks)
    return float(cumdisp[-1])


def _solve_grab_length(
    target_disp: float,
    cfg: TechniqueConfig,
    profile: CalibrationProfile | None,
    strategy: ForceStrategy,
    user: "UserParams",
    start_tick: int,
    upper: float | None,
) -> float:
    """Hand length whose modeled grab displacement matches target_disp."""
    c = cfg.base_gain_c
    if cfg.technique is Technique.CONSTANT:
        return target_disp / c
    if cfg.technique is Technique.FORCEPINCH and strategy is ForceStrategy.CONSTANT_HEAVY:
        prof = profile or identity_profile(c)
        return target_disp / float(prof.speed(prof.f_max))

    hi = upper if upper is not None else max(target_disp / c, 1e-3)
    while grab_displacement(hi, cfg, profile, strategy, user, start_tick) < target_disp:
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError("grab length solve diverged")
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if grab_displacement(mid, cfg, profile, strategy, user, start_tick) < target_disp:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class UserParams:
    """Motor parameters of the synthetic user."""

    reach: float | None = None  # max hand displacement per grab; None = unlimited
    transit_peak_speed: float = 2.0  # m/s, peak hand speed of a grab segment
    min_grab_duration: float = 0.2  # s
    return_duration: float = 0.3  # s, hand travel back to the home pose
    settle_ticks: int = 22  # idle ticks before each grab (flushes the velocity window)
    landing_tolerance: float = 0.005  # m, stop clutching below this planned remainder
    max_grabs: int = 64
    trace_speed: float = 0.5  # m/s hand speed while tracing a path


def _nominal_gain(cfg: TechniqueConfig, profile: CalibrationProfile | None,
                  strategy: ForceStrategy, user: UserParams) -> float:
    """The gain the synthetic user expects while tracing."""
    if cfg.technique is Technique.PRISM:
        return eval_prism(user.trace_speed, cfg)
    if cfg.technique is Technique.FORCEPINCH:
        prof = profile or identity_profile(cfg.base_gain_c)
        return float(prof.speed(prof.f_max))
    return cfg.base_gain_c


def _trace_stream(task: TracePath, cfg: TechniqueConfig, profile, strategy,
                  noise: NoiseModel, user: UserParams, rng) -> list[InputSample]:
    gain = _nominal_gain(cfg, profile, strategy, user)
    pts = np.asarray(task.polyline, dtype=float)
    rel = (pts - pts[0]) / gain
    waypoints = tuple((float(x), float(y), 0.0) for x, y in rel)
    seg_len = np.linalg.norm(np.diff(rel, axis=0), axis=1)
    durations = tuple(max(0.02, float(l) / user.trace_speed) for l in seg_len)
    plan = MotionPlan(waypoints, durations, strategy)

    samples = _idle_samples(0, user.settle_ticks, waypoints[0], noise, rng)
    samples += gen_input_stream(
        plan, strategy, noise, profile,
        start_tick=user.settle_ticks, final_release=True, rng=rng,
    )
    tail_tick = round(samples[-1].t / TICK_PERIOD_S) + 1
    samples += _idle_samples(tail_tick, 5, samples[-1].hand_pos, noise, rng)
    return samples


def make_task_stream(
    task,
    cfg: TechniqueConfig,
    profile: CalibrationProfile | None = None,
    strategy: ForceStrategy = ForceStrategy.CONSTANT_HEAVY,
    noise: NoiseModel | None = None,
    user: UserParams | None = None,
) -> list[InputSample]:
    """Full input stream for one trial of the given task.

    Slider and placement trials run a clutching loop: pinched grabs toward
    the target, releasing and returning the hand whenever the per-grab reach
    is exhausted, until the planned remainder is within tolerance. Tracing
    runs one pinched pass along the path.
    """
    noise = noise or NoiseModel(tremor_amplitude=0.0)
    user = user or UserParams()
    rng = np.random.default_rng(noise.seed)

    if isinstance(task, TracePath):
        return _trace_stream(task, cfg, profile, strategy, noise, user, rng)

    if isinstance(task, SliderTrial):
        start = np.asarray(task.start_position(), dtype=float)
        target = np.asarray(task.target_position(), dtype=float)
        reach = user.reach
    elif isinstance(task, PlacementTrial):
        start = np.asarray(task.start_position(), dtype=float)
        target = np.asarray(task.target_position(), dtype=float)
        reach = user.reach if user.reach is not None else 0.5
    else:
        raise TypeError(f"unsupported task type: {type(task).__name__}")

    remaining = float(np.linalg.norm(target - start))
    direction = (target - start) / remaining if remaining > 0 else np.zeros(3)
    home = np.zeros(3)

    samples: list[InputSample] = []
    next_tick = 0
    grabs = 0
    while remaining > user.landing_tolerance and grabs < user.max_grabs:
        samples += _idle_samples(next_tick, user.settle_ticks, tuple(home), noise, rng)
        next_tick += user.settle_ticks
        grab_start = next_tick

        if reach is not None:
            covered = grab_displacement(reach, cfg, profile, strategy, user, grab_start)
            if covered < remaining - user.landing_tolerance:
                x = reach
                planned = covered
            else:
                x = _solve_grab_length(remaining, cfg, profile, strategy, user,
                                       grab_start, upper=reach)
                planned = remaining
        else:
            x = _solve_grab_length(remaining, cfg, profile, strategy, user,
                                   grab_start, upper=None)
            planned = remaining

        ticks, duration = _grab_profile(x, user)
        endpoint = home + x * direction
        plan = MotionPlan((tuple(home), tuple(endpoint)), (duration,), strategy)
        grab = gen_input_stream(plan, strategy, noise, profile,
                                start_tick=grab_start, final_release=True, rng=rng)
        samples += grab
        next_tick = grab_start + ticks + 2
        remaining -= planned
        grabs += 1

        if remaining > user.landing_tolerance:
            ret_ticks = max(2, int(round(user.return_duration / TICK_PERIOD_S)))
            ret_t = np.arange(1, ret_ticks + 1) * TICK_PERIOD_S
            frac = _minjerk_fractions(ret_t / (ret_ticks * TICK_PERIOD_S))
            ret_pos = endpoint + frac[:, None] * (home - endpoint)
            jitter = (
                rng.normal(0.0, noise.tremor_amplitude, ret_pos.shape)
                if noise.tremor_amplitude > 0.0
                else 0.0
            )
            ret_pos = ret_pos + jitter
            for j in range(ret_ticks):
                samples.append(InputSample(
                    (next_tick + j) * TICK_PERIOD_S,
                    tuple(ret_pos[j].tolist()),
                    0.0,
                    False,
                ))
            next_tick += ret_ticks

    samples += _idle_samples(next_tick, 5, samples[-1].hand_pos if samples else tuple(home),
                             noise, rng)
    return samples


def stream_to_jsonl(samples: list[InputSample]) -> str:
    import json

    lines = [
        json.dumps(
            {"t": s.t, "hand": list(s.hand_pos), "force": s.raw_force, "pinch": s.pinching},
            sort_keys=True,
            separators=(",", ":"),
        )
        for s in samples
    ]
    return "\n".join(lines) + "\n"


def stream_from_jsonl(text: str) -> list[InputSample]:
    import json

    samples = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        data = json.loads(line)
        samples.append(
            InputSample(data["t"], tuple(data["hand"]), data["force"], data["pinch"])
        )
    return samples

