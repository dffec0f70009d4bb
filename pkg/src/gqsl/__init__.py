"""Quantum speed limits for Gaussian states under quadratic dynamics."""

from gqsl.dynamics import (
    BoundReport,
    QslTimes,
    Trajectory,
    check_bound,
    evolve_open,
    evolve_open_exact,
    evolve_unitary,
    qbm_speed_closed_form,
    qsl_times,
)
from gqsl.errors import GqslError
from gqsl.metric import distance_theta, fidelity, infidelity
from gqsl.models import DynamicsWarning, OpenDynamics, QBMParams, qbm_dynamics
from gqsl.speed import (
    SpeedReport,
    large_n_equivalents,
    single_mode_extrema,
    speed_harmonic,
    speed_open,
    speed_single_mode,
    speed_unitary,
    speed_unitary_pure,
)
from gqsl.states import (
    GaussianState,
    SqueezeSpec,
    displace,
    make_pure_squeezed,
    make_thermal_squeezed,
    make_vacuum,
    purity,
    validate,
)
from gqsl.symplectic import QuadraticGenerator, propagator, single_mode_generator

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "DynamicsWarning", "GaussianState", "GqslError", "OpenDynamics",
    "QBMParams", "QslTimes", "QuadraticGenerator", "SpeedReport", "SqueezeSpec",
    "Trajectory", "check_bound", "displace", "distance_theta", "evolve_open",
    "evolve_open_exact", "evolve_unitary", "fidelity", "infidelity", "large_n_equivalents",
    "make_pure_squeezed", "make_thermal_squeezed", "make_vacuum", "propagator", "purity",
    "qbm_dynamics", "qbm_speed_closed_form", "qsl_times", "single_mode_extrema",
    "single_mode_generator", "speed_harmonic", "speed_open", "speed_single_mode",
    "speed_unitary", "speed_unitary_pure", "validate",
]
