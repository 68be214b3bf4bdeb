"""Adaptive control allocation for over-actuated sampled-data systems.

A commanded net moment is distributed among redundant actuators through an
adaptive parameter matrix that is updated online from the measured achieved
moment alone, so actuator effectiveness losses are compensated without any
identification.  The package also ships the LQR-with-integrator outer loop,
the ADMIRE benchmark plant, a deterministic simulation harness with CSV and
SVG output, and a CLI (``alloc-adapt``).
"""

__version__ = "0.1.0"

from .allocator import (
    CLOSED_LOOP,
    OPEN_LOOP,
    AllocatorConfig,
    AllocatorState,
    Assumption1Report,
    allocation_error,
    check_assumption1,
    compute_u,
    epsilon,
    initial_state,
    sigma_sq,
    step_reference,
    step_xi,
    update_theta,
)
from .controller import (
    AugmentedSystem,
    LqrSolution,
    build_augmented,
    control,
    integrator_step,
    soft_saturate,
    solve_dare,
)
from .errors import (
    AllocAdaptError,
    AssumptionError,
    ConfigError,
    ConvergenceError,
    DimensionError,
    NonFiniteError,
    SingularMatrixError,
)
from .plant import Effectiveness, PlantModel, admire_preset, measured_moment
from .scenario import (
    ScenarioConfig,
    ScenarioTrace,
    admire_benchmark,
    doublet,
    ideal_theta,
    lyapunov_value,
    metrics,
    read_trace_csv,
    reference_signal,
    run,
    trace_from_csv,
    write_trace_csv,
)

__all__ = [
    "AllocatorConfig",
    "AllocatorState",
    "Assumption1Report",
    "AugmentedSystem",
    "CLOSED_LOOP",
    "Effectiveness",
    "LqrSolution",
    "OPEN_LOOP",
    "PlantModel",
    "ScenarioConfig",
    "ScenarioTrace",
    "admire_benchmark",
    "admire_preset",
    "allocation_error",
    "build_augmented",
    "check_assumption1",
    "compute_u",
    "control",
    "doublet",
    "epsilon",
    "ideal_theta",
    "initial_state",
    "integrator_step",
    "lyapunov_value",
    "measured_moment",
    "metrics",
    "read_trace_csv",
    "reference_signal",
    "run",
    "sigma_sq",
    "soft_saturate",
    "solve_dare",
    "step_reference",
    "step_xi",
    "trace_from_csv",
    "update_theta",
    "write_trace_csv",
    "AllocAdaptError",
    "AssumptionError",
    "ConfigError",
    "ConvergenceError",
    "DimensionError",
    "NonFiniteError",
    "SingularMatrixError",
]
