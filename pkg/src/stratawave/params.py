"""Admissibility of parameter sets and the small-coefficient anchor time.

The mixed-nonlinearity regime requires the quadratic coefficient to be of
order epsilon.  Along the ray the coefficient decays, and for theta = omega
the time at which its bracket vanishes has the closed form

    t0 = (1/omega) * [ ((gamma+1)/(2*alpha) + 3*beta) / (2-gamma) - 1 ]

t0 >= 0 bounds alpha:  (gamma+1)/(2*alpha) + 3*beta >= 2 - gamma.  A
bisection root finder for the full time-dependent coefficient (no theta =
omega assumption, epsilon target instead of an exact zero) backs the closed
form up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from . import atmosphere as atm
from .atmosphere import AtmosphereParams
from .errors import AdmissibilityError
from .thermo import GasParams, quadratic_coefficient

__all__ = [
    "AdmissibleRun",
    "anchor_time",
    "anchor_time_root",
    "alpha_bound",
    "check_alpha_bound",
    "quadratic_coefficient_at",
    "validate_run",
]


@dataclass(frozen=True)
class AdmissibleRun:
    """A validated parameter set with its anchor time and residual."""

    gas: GasParams
    atmos: AtmosphereParams
    t0: float
    gamma_residual: float


def anchor_time(gas: GasParams, ap: AtmosphereParams) -> float:
    """Closed-form anchor time; requires theta = omega, gamma < 2, alpha > 0.

    Negative values are inadmissible (the small-coefficient condition cannot
    be met at any nonnegative time) and raise :class:`AdmissibilityError`.
    """
    if abs(ap.theta - ap.omega) > 1e-12 * max(1.0, ap.omega):
        raise AdmissibilityError("theta == omega", "closed-form anchor needs theta = omega")
    if ap.omega <= 0.0:
        raise AdmissibilityError("omega > 0", "closed-form anchor needs omega > 0")
    if gas.alpha <= 0.0:
        raise AdmissibilityError("alpha > 0", "closed-form anchor needs alpha > 0")
    t0 = (1.0 / ap.omega) * (
        ((gas.gamma + 1.0) / (2.0 * gas.alpha) + 3.0 * gas.beta) / (2.0 - gas.gamma) - 1.0
    )
    if t0 < 0.0:
        raise AdmissibilityError(
            "(gamma+1)/(2*alpha) + 3*beta >= 2 - gamma",
            f"anchor time {t0} < 0: alpha exceeds its admissible bound",
        )
    return t0


def alpha_bound(gas_or_beta, gamma: float | None = None) -> float:
    """Largest admissible alpha for given beta, gamma; inf past the pole.

    For gamma = 1.01 this is 67/(66 - 200*beta).
    """
    if isinstance(gas_or_beta, GasParams):
        beta, gamma = gas_or_beta.beta, gas_or_beta.gamma
    else:
        beta = float(gas_or_beta)
        if gamma is None:
            raise TypeError("gamma required when passing beta directly")
    denom = (2.0 - gamma) - 3.0 * beta
    if denom <= 0.0:
        return math.inf
    return (gamma + 1.0) / (2.0 * denom)


def check_alpha_bound(gas: GasParams) -> bool:
    """True iff (gamma+1)/(2*alpha) + 3*beta >= 2 - gamma."""
    if gas.alpha <= 0.0:
        return True  # the inequality is vacuous without attraction
    return (gas.gamma + 1.0) / (2.0 * gas.alpha) + 3.0 * gas.beta >= 2.0 - gas.gamma


def quadratic_coefficient_at(gas: GasParams, ap: AtmosphereParams, t: float) -> float:
    """Full time-dependent quadratic coefficient along the ray."""
    x3 = atm.height_at(ap, t)
    rho0, a0 = atm.profiles(ap, x3)
    return quadratic_coefficient(gas, rho0, a0, atm.grad_phi_norm_at(ap, t))


def anchor_time_root(
    gas: GasParams,
    ap: AtmosphereParams,
    epsilon_target: float | None = None,
    t_max: float = 200.0,
) -> float:
    """Root of the full small-coefficient condition, no simplifications.

    Solves  Gamma(t) = ((gamma+1)/2) * epsilon  by bracketing + bisection to
    1e-8 in the residual.  Raises :class:`AdmissibilityError` when the
    condition never changes sign on [0, t_max] (for example alpha = 0, where
    the coefficient's bracket stays at 1).
    """
    eps = gas.epsilon if epsilon_target is None else float(epsilon_target)
    target = 0.5 * (gas.gamma + 1.0) * eps

    def residual(t):
        return quadratic_coefficient_at(gas, ap, t) - target

    r0 = residual(0.0)
    if r0 == 0.0:
        return 0.0
    # bracket by geometric scan
    t_lo, t_hi = 0.0, None
    t_probe = 1e-3
    while t_probe <= t_max:
        if residual(t_probe) * r0 < 0.0:
            t_hi = t_probe
            break
        t_lo = t_probe
        t_probe *= 1.6
    if t_hi is None:
        raise AdmissibilityError(
            "Gamma(t) - target changes sign on [0, t_max]",
            "small-coefficient condition has no root; fall back to the closed form",
        )
    root = float(brentq(residual, t_lo, t_hi, xtol=1e-12, rtol=8.9e-16))
    if abs(residual(root)) > 1e-8:
        raise AdmissibilityError(
            "|Gamma(t0) - target| <= 1e-8", f"root residual {residual(root)}"
        )
    return root


def resolve_anchor(gas: GasParams, ap: AtmosphereParams) -> float:
    """Anchor time for any stratification.

    Uses the closed form in its theta = omega regime (the reference value for
    the figure parameter sets) and the full root finder otherwise.
    """
    theta_eq_omega = abs(ap.theta - ap.omega) <= 1e-12 * max(1.0, ap.omega) and ap.omega > 0.0
    if theta_eq_omega:
        return anchor_time(gas, ap)
    return anchor_time_root(gas, ap)


def validate_run(
    gas: GasParams,
    ap: AtmosphereParams,
    t_start: float = 0.0,
    t_max: float | None = None,
) -> AdmissibleRun:
    """Validate a run configuration; raises with the violated inequality named.

    Checks the covolume exclusion along the ray (beta * rho0(t) < 1 for all
    t >= t_start; rho0 <= rho0(t_start) on the ascending ray), the alpha
    bound when theta = omega, and computes the anchor time when defined.
    """
    if t_start < 0.0:
        raise AdmissibilityError("t_start >= 0")
    if t_max is not None and t_max < t_start:
        raise AdmissibilityError("t_max >= t_start")
    rho_peak, _ = atm.profiles(ap, atm.height_at(ap, t_start))
    if gas.beta * rho_peak >= 1.0:
        raise AdmissibilityError(
            "beta * rho0(t) < 1",
            f"covolume exclusion fails at t_start: beta*rho0 = {gas.beta * rho_peak}",
        )
    theta_eq_omega = abs(ap.theta - ap.omega) <= 1e-12 * max(1.0, ap.omega) and ap.omega > 0.0
    if theta_eq_omega and not check_alpha_bound(gas):
        raise AdmissibilityError(
            "(gamma+1)/(2*alpha) + 3*beta >= 2 - gamma",
            f"alpha = {gas.alpha} exceeds the bound {alpha_bound(gas)}",
        )
    t0 = math.nan
    if theta_eq_omega and gas.alpha > 0.0:
        t0 = anchor_time(gas, ap)
    residual = quadratic_coefficient_at(gas, ap, t0) if math.isfinite(t0) else math.nan
    return AdmissibleRun(gas=gas, atmos=ap, t0=t0, gamma_residual=residual)
