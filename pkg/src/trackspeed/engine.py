"""Deterministic session state machine.

Consumes a stream of timestamped input samples (hand position, raw pinch
force, pinch boolean) and integrates object motion: while pinched, each
tick's hand displacement is scaled by the technique's current tracking
speed. Release optionally rolls the object back to its position at the
peak-force tick of the trailing 0.2 s, compensating the jitter of letting
go. Replaying the same stream always reproduces the same log, bit for bit.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .calibration import CalibrationProfile
from .errors import MissingProfile, NonMonotonicTime
from .mapping import Technique, TechniqueConfig, cursor_radius, eval_gogo, eval_prism

Vec3 = tuple[float, float, float]

VELOCITY_WINDOW_S = 0.1
ROLLBACK_WINDOW_S = 0.2
TICK_PERIOD_S = 0.01  # nominal 100 Hz sampling period
_TIME_EPS = 1e-9  # guards window pruning against float timestamp jitter


@dataclass(frozen=True)
class InputSample:
    t: float
    hand_pos: Vec3
    raw_force: float
    pinching: bool


@dataclass(frozen=True)
class LogRecord:
    t: float
    object_pos: Vec3
    pinching: bool
    hand_pos: Vec3
    speed: float


@dataclass(frozen=True)
class EngineFrame:
    object_pos: Vec3
    speed: float
    cursor_radius: float


def estimate_velocity(window: Sequence[tuple[float, Vec3]]) -> float:
    """Hand speed from a sliding window of (t, position) samples.

    Displacement magnitude between the window's endpoints divided by the
    window's time span; a single-sample window reads as stationary.
    """
    if len(window) < 2:
        return 0.0
    t0, p0 = window[0]
    t1, p1 = window[-1]
    span = t1 - t0
    if span <= 0.0:
        return 0.0
    dx = p1[0] - p0[0]
    dy = p1[1] - p0[1]
    dz = p1[2] - p0[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz) / span


class Session:
    """Live state for one trial: pinch lifecycle, kinematics, and the log.

    Single-threaded by design; run independent sessions for concurrency.
    """

    def __init__(
        self,
        cfg: TechniqueConfig,
        profile: CalibrationProfile | None = None,
        object_start: Vec3 = (0.0, 0.0, 0.0),
        task=None,
        seed: int | None = None,
        keep_log: bool = True,
    ):
        if cfg.technique is Technique.FORCEPINCH and profile is None:
            raise MissingProfile("force-responsive sessions need a calibration profile")
        if profile is not None and profile.base_gain_c != cfg.base_gain_c:
            profile = profile.with_gain(cfg.base_gain_c)
        self.cfg = cfg
        self.profile = profile
        self.task = task
        self.seed = seed
        self.keep_log = keep_log
        self.object_pos: Vec3 = tuple(float(v) for v in object_start)
        self.pinch_active = False
        self.gogo_anchor: Vec3 | None = None
        self.op_count = 0  # completed pinch cycles
        self.trial_log: list[LogRecord] = []
        self._vel_window: deque[tuple[float, Vec3]] = deque()
        self._force_history: deque[tuple[float, float, Vec3]] = deque()
        self._prev_hand: Vec3 | None = None
        self._last_t: float | None = None

    def _engaged(self, raw_force: float) -> bool:
        gate = self.cfg.min_engage_force
        return gate is None or raw_force >= gate

    def _eval_speed(self, sample: InputSample) -> float:
        cfg = self.cfg
        tech = cfg.technique
        if tech is Technique.CONSTANT:
            return cfg.base_gain_c
        if tech is Technique.GOGO:
            if self.pinch_active and self.gogo_anchor is not None:
                ax, ay, az = self.gogo_anchor
                hx, hy, hz = sample.hand_pos
                d = math.sqrt((hx - ax) ** 2 + (hy - ay) ** 2 + (hz - az) ** 2)
            else:
                d = 0.0
            return eval_gogo(d, cfg)
        if tech is Technique.PRISM:
            return eval_prism(estimate_velocity(self._vel_window), cfg)
        return self.profile.speed(sample.raw_force)

    def step(self, sample: InputSample) -> EngineFrame:
        t = sample.t
        if self._last_t is not None and t <= self._last_t:
            raise NonMonotonicTime(f"sample at t={t} does not advance past t={self._last_t}")
        hand = sample.hand_pos

        window = self._vel_window
        window.append((t, hand))
        cutoff = t - VELOCITY_WINDOW_S - _TIME_EPS
        while window[0][0] < cutoff:
            window.popleft()

        rising = False
        if sample.pinching and not self.pinch_active:
            if self._engaged(sample.raw_force):
                rising = True
                self.pinch_active = True
                self.gogo_anchor = hand
                self._force_history.clear()
        elif not sample.pinching and self.pinch_active:
            history = self._force_history
            hist_cutoff = t - ROLLBACK_WINDOW_S - _TIME_EPS
            while history and history[0][0] < hist_cutoff:
                history.popleft()
            if self.cfg.rollback_active:
                apply_rollback(self)
            self.pinch_active = False
            self.gogo_anchor = None
            self.op_count += 1
            history.clear()

        speed = self._eval_speed(sample)

        if self.pinch_active and not rising and self._prev_hand is not None:
            px, py, pz = self._prev_hand
            ox, oy, oz = self.object_pos
            self.object_pos = (
                ox + (hand[0] - px) * speed,
                oy + (hand[1] - py) * speed,
                oz + (hand[2] - pz) * speed,
            )

        if self.pinch_active:
            history = self._force_history
            history.append((t, sample.raw_force, self.object_pos))
            hist_cutoff = t - ROLLBACK_WINDOW_S - _TIME_EPS
            while history[0][0] < hist_cutoff:
                history.popleft()

        if self.keep_log:
            # pinch_active, not the raw boolean: with the engage gate on, the
            # object's selection state is what the log must reflect.
            self.trial_log.append(LogRecord(t, self.object_pos, self.pinch_active, hand, speed))
        self._prev_hand = hand
        self._last_t = t
        return EngineFrame(self.object_pos, speed, cursor_radius(speed, self.cfg))

    def header(self) -> dict:
        cfg = self.cfg
        return {
            "technique": cfg.technique.value,
            "c": cfg.base_gain_c,
            "rollback": cfg.rollback_active,
            "min_engage_force": cfg.min_engage_force,
            "profile_digest": self.profile.digest() if self.profile else None,
            "seed": self.seed,
            "task": self.task.to_json() if self.task is not None else None,
        }


def apply_rollback(session: Session) -> Vec3:
    """Restore the object to its position at the peak-force tick.

    Scans the trailing force history; equal peaks resolve to the latest
    tick. An empty history leaves the object where it is.
    """
    best: tuple[float, float, Vec3] | None = None
    for rec in session._force_history:
        if best is None or rec[1] >= best[1]:
            best = rec
    if best is not None:
        session.object_pos = best[2]
    return session.object_pos


def start_session(
    task,
    cfg: TechniqueConfig,
    profile: CalibrationProfile | None = None,
    seed: int | None = None,
    keep_log: bool = True,
) -> Session:
    """Session with the object placed at the task's start position."""
    return Session(
        cfg,
        profile=profile,
        object_start=task.start_position(),
        task=task,
        seed=seed,
        keep_log=keep_log,
    )


def run_stream(session: Session, samples: Iterable[InputSample]) -> Session:
    step = session.step
    for sample in samples:
        step(sample)
    return session


def record_to_json(record: LogRecord) -> dict:
    return {
        "t": record.t,
        "object": list(record.object_pos),
        "pinching": record.pinching,
        "hand": list(record.hand_pos),
        "speed": record.speed,
    }


def record_from_json(data: dict) -> LogRecord:
    return LogRecord(
        t=data["t"],
        object_pos=tuple(data["object"]),
        pinching=data["pinching"],
        hand_pos=tuple(data["hand"]),
        speed=data["speed"],
    )


def serialize_log(header: dict, records: Iterable[LogRecord]) -> str:
    """Trial log as JSON Lines: one header line, then one line per tick."""
    lines = [json.dumps({"type": "header", **header}, sort_keys=True, separators=(",", ":"))]
    lines.extend(
        json.dumps(record_to_json(r), sort_keys=True, separators=(",", ":")) for r in records
    )
    return "\n".join(lines) + "\n"


def write_trial_log(session: Session, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_log(session.header(), session.trial_log))


def read_trial_log(path) -> tuple[dict, list[LogRecord]]:
    header: dict | None = None
    records: list[LogRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed log line {lineno}: {exc}") from exc
            if lineno == 1:
                if data.get("type") != "header":
                    raise ValueError("malformed log line 1: missing header")
                header = data
            else:
                try:
                    records.append(record_from_json(data))
                except (KeyError, TypeError) as exc:
                    raise ValueError(f"malformed log line {lineno}: {exc}") from exc
    if header is None:
        raise ValueError("empty trial log")
    return header, records
