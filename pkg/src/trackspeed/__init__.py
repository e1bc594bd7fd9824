"""Tracking-speed control engine and evaluation harness.

Four techniques share one deterministic 100 Hz session engine: a constant
control-display gain, displacement-responsive scaling, velocity-responsive
scaling, and force-responsive scaling where pinch force sets the gain
through a per-user calibrated monotone curve.
"""

from .calibration import (
    CalibrationProfile,
    ForceSample,
    build_force_mapping,
    cluster_force_levels,
    eval_curve,
    identity_profile,
)
from .engine import EngineFrame, InputSample, LogRecord, Session, run_stream, start_session
from .mapping import (
    Technique,
    TechniqueConfig,
    cursor_radius,
    eval_constant,
    eval_forcepinch,
    eval_gogo,
    eval_prism,
)
from .metrics import TrialMetrics, compute_trial_metrics
from .synthuser import ForceStrategy, MotionPlan, NoiseModel, UserParams, make_task_stream
from .tasks import PlacementTrial, Shape, SliderTrial, TracePath, make_task

__version__ = "0.1.0"

__all__ = [
    "CalibrationProfile",
    "EngineFrame",
    "ForceSample",
    "ForceStrategy",
    "InputSample",
    "LogRecord",
    "MotionPlan",
    "NoiseModel",
    "PlacementTrial",
    "Session",
    "Shape",
    "SliderTrial",
    "Technique",
    "TechniqueConfig",
    "TracePath",
    "TrialMetrics",
    "UserParams",
    "build_force_mapping",
    "cluster_force_levels",
    "compute_trial_metrics",
    "cursor_radius",
    "eval_constant",
    "eval_curve",
    "eval_forcepinch",
    "eval_gogo",
    "eval_prism",
    "identity_profile",
    "make_task",
    "make_task_stream",
    "run_stream",
    "start_session",
]
