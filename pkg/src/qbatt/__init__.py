"""Feedback-charged quantum battery: master-equation steady states, dynamics and trajectories."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .model import ReservoirKind, SystemParams, build_liouvillian, lindblad_rhs
from .operators import BasisKind, BasisSpec
from .steady import (
    critical_gammaB,
    ergotropy_closed,
    reference_scheme,
    solve_steady,
    steady_analytic,
    steady_from,
    steady_numeric,
    stored_energy_closed,
)
from .metrics import BatteryMetrics, ergotropy, multiparticle_metrics, single_cell_metrics, stored_energy
from .dynamics import evolve, evolve_to_steady
from .trajectories import TrajectoryConfig, ensemble_average, run_trajectory
from .sweep import optimize

__all__ = [
    "BasisKind",
    "BasisSpec",
    "BatteryMetrics",
    "ReservoirKind",
    "SystemParams",
    "TrajectoryConfig",
    "build_liouvillian",
    "critical_gammaB",
    "ensemble_average",
    "ergotropy",
    "ergotropy_closed",
    "evolve",
    "evolve_to_steady",
    "lindblad_rhs",
    "multiparticle_metrics",
    "optimize",
    "reference_scheme",
    "run_trajectory",
    "single_cell_metrics",
    "solve_steady",
    "steady_analytic",
    "steady_from",
    "steady_numeric",
    "stored_energy",
    "stored_energy_closed",
]
