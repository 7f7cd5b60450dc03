"""Event-driven samplers for binary distributions via continuous augmentations.

A binary target p(s) on {-1, +1}^d is extended to a piecewise smooth density
over R^d whose orthants carry the states' masses.  Two samplers explore it:
a bouncy particle sampler (straight-line motion, gradient bounces, Metropolis
wall crossings) and an exact-trajectory Hamiltonian sampler (harmonic arcs,
energy-threshold wall crossings).  An exhaustive enumeration oracle and a
benchmark harness score both against the truth.
"""

from .augmentation import Augmentation, OnWallError, orthant_gradient, potential, wall_jump
from .bps import (
    BpsConfig,
    BpsResult,
    Event,
    EventKind,
    OrthantState,
    bounce_time_exponential,
    bounce_time_gaussian,
    bps_run,
    bps_step,
    discrete_time_reference_step,
    reflect_off_gradient,
    wall_event,
    wall_times,
)
from .estimators import MomentAccumulator
from .harness import (
    CSV_COLUMNS,
    SAMPLERS,
    CalibrationResult,
    ExperimentConfig,
    ExperimentResult,
    calibrate_budget,
    experiment_to_csv,
    run_experiment,
    write_csv,
)
from .hmc import (
    HmcConfig,
    HmcResult,
    default_travel_time,
    evolve_harmonic,
    hmc_iterate,
    hmc_run,
    hmc_wall_rule,
    wall_hit_time,
)
from .model import MrfModel, mrf_sample
from .oracle import (
    MAX_ENUM_DIM,
    EnumerationInfeasibleError,
    MomentTable,
    enumerate_moments,
    summed_mse,
)

__version__ = "0.1.0"

__all__ = [
    "Augmentation",
    "OnWallError",
    "orthant_gradient",
    "potential",
    "wall_jump",
    "BpsConfig",
    "BpsResult",
    "Event",
    "EventKind",
    "OrthantState",
    "bounce_time_exponential",
    "bounce_time_gaussian",
    "bps_run",
    "bps_step",
    "discrete_time_reference_step",
    "reflect_off_gradient",
    "wall_event",
    "wall_times",
    "MomentAccumulator",
    "CSV_COLUMNS",
    "SAMPLERS",
    "CalibrationResult",
    "ExperimentConfig",
    "ExperimentResult",
    "calibrate_budget",
    "experiment_to_csv",
    "run_experiment",
    "write_csv",
    "HmcConfig",
    "HmcResult",
    "default_travel_time",
    "evolve_harmonic",
    "hmc_iterate",
    "hmc_run",
    "hmc_wall_rule",
    "wall_hit_time",
    "MrfModel",
    "mrf_sample",
    "MAX_ENUM_DIM",
    "EnumerationInfeasibleError",
    "MomentTable",
    "enumerate_moments",
    "summed_mse",
    "__version__",
]
