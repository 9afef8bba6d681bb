"""Van der Waals equation of state and acoustic nonlinearity coefficients.

The fluid is a van der Waals gas with attraction constant ``alpha`` and
covolume constant ``beta`` (nondimensional), specific-heat ratio ``gamma``:

    (p + alpha*rho^2) * (1 - beta*rho) = rho*R*T

Along an isentrope, p = K(s) * rho^gamma * (1-beta*rho)^-gamma - alpha*rho^2
with K(s) = exp((s - s0)/c_v), which gives the sound speed

    a^2 = gamma*(p + alpha*rho^2) / (rho*(1 - beta*rho)) - 2*rho*alpha

The module also evaluates the coefficients that control nonlinear steepening
of an acoustic wave on a background state (rho0, a0):

* quadratic coefficient  G*|grad phi|  with  G = 1 + rho0*a_rho/a0
* cubic coefficient      Omega*|grad phi|/a0  with
  Omega = (rho0^2/a0) * d/drho [ (1/rho) d(a*rho)/drho ]

Closed forms for both are provided alongside exact and finite-difference
evaluations used as self-checks.  Ideal gas is the alpha = beta = 0 special
case.  All functions are pure; no internal state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "GasParams",
    "ThermoState",
    "EosDerivatives",
    "pressure",
    "sound_speed",
    "entropy",
    "make_state",
    "quadratic_coefficient",
    "quadratic_coefficient_scaled",
    "cubic_nonlinearity",
    "cubic_nonlinearity_exact",
    "cubic_nonlinearity_fd",
    "cubic_coefficient",
    "eos_derivatives",
]


@dataclass(frozen=True)
class GasParams:
    """Van der Waals constants and the amplitude scale of the wave.

    Parameters
    ----------
    alpha : float
        Attraction constant, >= 0.
    beta : float
        Covolume constant, >= 0.
    gamma : float
        Specific-heat ratio, 1 < gamma <= 5/3.
    epsilon : float
        Small amplitude parameter, > 0.
    R, c_v, s0 : float
        Gas constant, specific heat at constant volume and entropy origin.
        They cancel in every transport coefficient; kept configurable for
        the entropy relation itself.
    """

    alpha: float
    beta: float
    gamma: float
    epsilon: float = 0.01
    R: float = 1.0
    c_v: float = 1.0
    s0: float = 0.0

    def __post_init__(self):
        if not 1.0 < self.gamma <= 5.0 / 3.0:
            raise DomainError(f"gamma must satisfy 1 < gamma <= 5/3, got {self.gamma}")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise DomainError("alpha and beta must be nonnegative")
        if self.epsilon <= 0.0:
            raise DomainError("epsilon must be positive")
        if self.R <= 0.0 or self.c_v <= 0.0:
            raise DomainError("R and c_v must be positive")


@dataclass(frozen=True)
class ThermoState:
    """A thermodynamically admissible state (covolume ok, a^2 > 0)."""

    rho: float
    p: float
    s: float
    a: float
    T: float


def _check_covolume(gas: GasParams, rho):
    if rho <= 0.0:
        raise DomainError(f"density must be positive, got {rho}")
    if gas.beta * rho >= 1.0:
        raise DomainError(
            f"covolume exclusion violated: beta*rho = {gas.beta * rho} >= 1"
        )


def pressure(gas: GasParams, rho: float, T: float) -> float:
    """Pressure from the equation of state, p = rho*R*T/(1-beta*rho) - alpha*rho^2."""
    _check_covolume(gas, rho)
    if T <= 0.0:
        raise DomainError(f"temperature must be positive, got {T}")
    return rho * gas.R * T / (1.0 - gas.beta * rho) - gas.alpha * rho**2


def sound_speed_squared(gas: GasParams, rho: float, p: float) -> float:
    """a^2 = gamma*(p+alpha*rho^2)/(rho*(1-beta*rho)) - 2*rho*alpha."""
    _check_covolume(gas, rho)
    return (
        gas.gamma * (p + gas.alpha * rho**2) / (rho * (1.0 - gas.beta * rho))
        - 2.0 * rho * gas.alpha
    )


def sound_speed(gas: GasParams, rho: float, p: float) -> float:
    """Sound speed; raises :class:`DomainError` when hyperbolicity is lost."""
    a2 = sound_speed_squared(gas, rho, p)
    if a2 <= 0.0:
        raise DomainError(f"loss of hyperbolicity: a^2 = {a2} <= 0")
    return math.sqrt(a2)


def entropy(gas: GasParams, rho: float, p: float) -> float:
    """Entropy from the first law: s = s0 + c_v*ln[(p+alpha rho^2)(1-beta rho)^gamma / rho^gamma]."""
    _check_covolume(gas, rho)
    arg = (p + gas.alpha * rho**2) * (1.0 - gas.beta * rho) ** gas.gamma / rho**gas.gamma
    if arg <= 0.0:
        raise DomainError(f"nonpositive entropy-relation argument: {arg}")
    return gas.s0 + gas.c_v * math.log(arg)


def temperature(gas: GasParams, rho: float, p: float) -> float:
    """Temperature from the equation of state."""
    _check_covolume(gas, rho)
    return (p + gas.alpha * rho**2) * (1.0 - gas.beta * rho) / (rho * gas.R)


def make_state(gas: GasParams, rho: float, p: float) -> ThermoState:
    """Build a validated state from (rho, p)."""
    return ThermoState(
        rho=rho,
        p=p,
        s=entropy(gas, rho, p),
        a=sound_speed(gas, rho, p),
        T=temperature(gas, rho, p),
    )


# ---------------------------------------------------------------------------
# Nonlinearity coefficients on a background (rho0, a0)
# ---------------------------------------------------------------------------


def quadratic_coefficient(
    gas: GasParams, rho0: float = 1.0, a0: float = 1.0, grad_phi_norm: float = 1.0
) -> float:
    """Quadratic (genuine) nonlinearity coefficient of the acoustic family.

    Closed form::

        ((gamma+1)/2) * [ 1/(1-beta*rho0)
            - 2*alpha*rho0*(2-gamma-3*beta*rho0) / (a0^2*(gamma+1)*(1-beta*rho0)) ]
        * |grad phi|

    which equals (1 + rho0*a_rho/a0)*|grad phi| for this equation of state.
    """
    _check_covolume(gas, rho0)
    if a0 <= 0.0:
        raise DomainError(f"sound speed must be positive, got {a0}")
    x = gas.beta * rho0
    bracket = 1.0 / (1.0 - x) - (
        2.0 * gas.alpha * rho0 * (2.0 - gas.gamma - 3.0 * x)
    ) / (a0**2 * (gas.gamma + 1.0) * (1.0 - x))
    return 0.5 * (gas.gamma + 1.0) * bracket * grad_phi_norm


def quadratic_coefficient_scaled(gas: GasParams) -> float:
    """Quadratic coefficient divided by the amplitude parameter: (gamma+1)/2.

    This is the O(1) factor left once alpha, beta are tuned so the full
    quadratic coefficient is of order epsilon.
    """
    return 0.5 * (gas.gamma + 1.0)


def cubic_nonlinearity(gas: GasParams, rho0: float = 1.0, a0: float = 1.0) -> float:
    """Cubic (material) nonlinearity coefficient, closed form.

    Production path::

        Omega = -( 3*(1+gamma)/(2*(1-beta*rho0))
                   - 3*alpha*beta*rho0^2 / ((1-beta*rho0)*a0^2) )

    This closed form drops additive terms proportional to the quadratic
    coefficient (and its square), which are O(epsilon) in the mixed
    nonlinearity regime; :func:`cubic_nonlinearity_exact` keeps them.
    """
    _check_covolume(gas, rho0)
    if a0 <= 0.0:
        raise DomainError(f"sound speed must be positive, got {a0}")
    x = gas.beta * rho0
    return -(
        3.0 * (1.0 + gas.gamma) / (2.0 * (1.0 - x))
        - 3.0 * gas.alpha * gas.beta * rho0**2 / ((1.0 - x) * a0**2)
    )


def cubic_coefficient(
    gas: GasParams, rho0: float = 1.0, a0: float = 1.0, grad_phi_norm: float = 1.0
) -> float:
    """Cubic coefficient of the evolution equation, Omega*|grad phi|/a0 closed form.

    Keeps terms through O(beta)::

        -(3*(1+gamma)/(2*a0))*(1+beta*rho0)*|grad phi|
            + (3*alpha*beta*rho0^2/a0^3)*|grad phi|
    """
    _check_covolume(gas, rho0)
    if a0 <= 0.0:
        raise DomainError(f"sound speed must be positive, got {a0}")
    return (
        -(3.0 * (1.0 + gas.gamma) / (2.0 * a0)) * (1.0 + gas.beta * rho0)
        + 3.0 * gas.alpha * gas.beta * rho0**2 / a0**3
    ) * grad_phi_norm


# ---------------------------------------------------------------------------
# Isentrope helpers and analytic derivatives
# ---------------------------------------------------------------------------


def _kfactor(gas: GasParams, rho0: float, a0: float) -> float:
    """Isentrope constant K with a(rho0) = a0 on that isentrope."""
    w = rho0 ** (gas.gamma - 1.0) * (1.0 - gas.beta * rho0) ** (-gas.gamma - 1.0)
    return (a0**2 + 2.0 * gas.alpha * rho0) / (gas.gamma * w)


def _a2_on_isentrope(gas: GasParams, kfac: float, rho: float) -> float:
    w = rho ** (gas.gamma - 1.0) * (1.0 - gas.beta * rho) ** (-gas.gamma - 1.0)
    return gas.gamma * kfac * w - 2.0 * gas.alpha * rho


@dataclass(frozen=True)
class EosDerivatives:
    """Analytic partial derivatives at a background state (rho0, a0).

    f4 = a^2/rho and f5 = p_s/rho are the state-dependent matrix entries of
    the quasilinear system; their rho/s partials feed the coefficient
    contractions.  Entropy enters through K(s) = K*exp((s-s0)/c_v), so every
    s-derivative is a c_v-scaled copy of the underlying function.
    """

    rho: float
    a: float
    p: float
    kfac: float
    p_s: float
    p_ss: float
    a_rho: float
    a_s: float
    a_rho_rho: float
    f4: float
    f4_rho: float
    f4_s: float
    f4_rho_rho: float
    f4_rho_s: float
    f4_ss: float
    f5: float
    f5_rho: float
    f5_s: float
    f5_rho_rho: float
    f5_rho_s: float
    f5_ss: float


def eos_derivatives(gas: GasParams, rho0: float = 1.0, a0: float = 1.0) -> EosDerivatives:
    """All EOS partials needed by the coefficient contractions, analytically."""
    _check_covolume(gas, rho0)
    if a0 <= 0.0:
        raise DomainError(f"sound speed must be positive, got {a0}")
    ga, be, al, cv = gas.gamma, gas.beta, gas.alpha, gas.c_v
    x = be * rho0
    one = 1.0 - x
    kfac = _kfactor(gas, rho0, a0)
    p0 = kfac * rho0**ga * one**-ga - al * rho0**2

    # W2 = rho^(g-2) (1-b rho)^(-g-1):    a^2/rho = gamma*K*W2 - 2*alpha
    w2 = rho0 ** (ga - 2.0) * one ** (-ga - 1.0)
    w2p = rho0 ** (ga - 3.0) * one ** (-ga - 2.0) * (ga - 2.0 + 3.0 * x)
    w2pp = rho0 ** (ga - 4.0) * one ** (-ga - 3.0) * (
        (ga - 3.0) * one * (ga - 2.0 + 3.0 * x)
        + (ga + 2.0) * x * (ga - 2.0 + 3.0 * x)
        + 3.0 * x * one
    )
    # V = rho^(g-1) (1-b rho)^(-g):       p_s/rho = K*V/(c_v*rho) ... careful:
    # p_s = K*rho^g*(1-b rho)^(-g)/c_v, so p_s/rho = K*V/c_v with V as above.
    v = rho0 ** (ga - 1.0) * one**-ga
    vp = rho0 ** (ga - 2.0) * one ** (-ga - 1.0) * (ga - 1.0 + x)
    vpp = rho0 ** (ga - 3.0) * one ** (-ga - 2.0) * (
        (ga - 2.0) * one * (ga - 1.0 + x)
        + (ga + 1.0) * x * (ga - 1.0 + x)
        + x * one
    )

    a2 = a0 * a0
    a2_rho = ga * kfac * (rho0 * w2p + w2) - 2.0 * al  # d(a^2)/drho = gamma*K*W' with W = rho*W2
    a2_rho_rho = ga * kfac * (rho0 * w2pp + 2.0 * w2p)
    a_rho = a2_rho / (2.0 * a0)
    a_rho_rho = (a2_rho_rho - 2.0 * a_rho**2) / (2.0 * a0)
    a2_s = (a2 + 2.0 * al * rho0) / cv  # gamma*K*W/c_v
    a_s = a2_s / (2.0 * a0)

    p_s = (p0 + al * rho0**2) / cv
    p_ss = (p0 + al * rho0**2) / cv**2

    f4 = a2 / rho0
    f4_rho = ga * kfac * w2p
    f4_rho_rho = ga * kfac * w2pp
    f4_s = ga * kfac * w2 / cv
    f4_rho_s = ga * kfac * w2p / cv
    f4_ss = ga * kfac * w2 / cv**2

    f5 = kfac * v / cv
    f5_rho = kfac * vp / cv
    f5_rho_rho = kfac * vpp / cv
    f5_s = kfac * v / cv**2
    f5_rho_s = kfac * vp / cv**2
    f5_ss = kfac * v / cv**3

    return EosDerivatives(
        rho=rho0, a=a0, p=p0, kfac=kfac,
        p_s=p_s, p_ss=p_ss,
        a_rho=a_rho, a_s=a_s, a_rho_rho=a_rho_rho,
        f4=f4, f4_rho=f4_rho, f4_s=f4_s,
        f4_rho_rho=f4_rho_rho, f4_rho_s=f4_rho_s, f4_ss=f4_ss,
        f5=f5, f5_rho=f5_rho, f5_s=f5_s,
        f5_rho_rho=f5_rho_rho, f5_rho_s=f5_rho_s, f5_ss=f5_ss,
    )


def cubic_nonlinearity_exact(gas: GasParams, rho0: float = 1.0, a0: float = 1.0) -> float:
    """Cubic nonlinearity from its defining density derivative, no truncation.

    Omega = (rho0^2/a0) * d/drho[(1/rho) d(a rho)/drho]
          = rho0^2*a_rho_rho/a0 + G - 2,   G = 1 + rho0*a_rho/a0.
    """
    d = eos_derivatives(gas, rho0, a0)
    g_val = 1.0 + rho0 * d.a_rho / a0
    return rho0**2 * d.a_rho_rho / a0 + g_val - 2.0


def cubic_nonlinearity_fd(
    gas: GasParams, rho0: float = 1.0, a0: float = 1.0, step: float = 1e-5
) -> float:
    """Self-check: differentiate the impedance slope numerically along the isentrope.

    Sigma(rho) = (1/rho) d(a*rho)/drho is evaluated with the analytic first
    derivative of a; the outer drho derivative is a central difference, so
    this path is independent of the analytic second derivative.
    """
    kfac = _kfactor(gas, rho0, a0)

    def impedance_slope(rho):
        a2 = _a2_on_isentrope(gas, kfac, rho)
        if a2 <= 0.0:
            raise DomainError("loss of hyperbolicity inside finite-difference stencil")
        a = math.sqrt(a2)
        hh = step * rho
        ap = math.sqrt(_a2_on_isentrope(gas, kfac, rho + hh))
        am = math.sqrt(_a2_on_isentrope(gas, kfac, rho - hh))
        a_rho = (ap - am) / (2.0 * hh)
        return (a + rho * a_rho) / rho

    h = step * rho0
    dsig = (impedance_slope(rho0 + h) - impedance_slope(rho0 - h)) / (2.0 * h)
    return rho0**2 * dsig / a0
