"""Nonlinear geometric-acoustics transport in a stratified van der Waals gas.

The library computes the quadratic/cubic nonlinearity and attenuation
coefficients of the amplitude evolution equation for a vertically ascending
sound wave, solves the equation by characteristics with breaking detection,
and by a conservative finite-volume scheme valid past breaking.
"""

from .atmosphere import AtmosphereParams, PhaseState, chi, phase_closed_form, profiles, trace_ray
from .errors import AdmissibilityError, DegenerateBackgroundError, DomainError, NumericalError
from .fv_solver import AmplitudeField, SolverConfig
from .params import AdmissibleRun, anchor_time, anchor_time_root, check_alpha_bound, validate_run
from .thermo import (
    GasParams,
    ThermoState,
    cubic_coefficient,
    cubic_nonlinearity,
    entropy,
    pressure,
    quadratic_coefficient,
    quadratic_coefficient_scaled,
    sound_speed,
)
from .transport import (
    BreakingResult,
    CharacteristicBundle,
    CoeffProvider,
    TransportCoeffs,
    advance_characteristics,
    breaking_time,
    coeffs,
    make_bundle,
    sigma_closed,
    sigma_ode,
    sine_profile,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "AdmissibleRun",
    "AmplitudeField",
    "AtmosphereParams",
    "BreakingResult",
    "CharacteristicBundle",
    "CoeffProvider",
    "DegenerateBackgroundError",
    "DomainError",
    "GasParams",
    "NumericalError",
    "PhaseState",
    "SolverConfig",
    "ThermoState",
    "TransportCoeffs",
    "advance_characteristics",
    "anchor_time",
    "anchor_time_root",
    "breaking_time",
    "check_alpha_bound",
    "chi",
    "coeffs",
    "cubic_coefficient",
    "cubic_nonlinearity",
    "entropy",
    "make_bundle",
    "phase_closed_form",
    "pressure",
    "profiles",
    "quadratic_coefficient",
    "quadratic_coefficient_scaled",
    "sigma_closed",
    "sigma_ode",
    "sine_profile",
    "sound_speed",
    "trace_ray",
    "validate_run",
    "__version__",
]
