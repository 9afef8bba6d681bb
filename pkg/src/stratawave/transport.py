"""Amplitude evolution equation: coefficients, characteristics, breaking.

Along the vertical ray the wave amplitude sigma(xi, t) obeys

    sigma_t + A(t) sigma sigma_xi - B(t) sigma^2 sigma_xi + g(t) sigma + c = 0

with the fast phase variable xi as spatial coordinate and

    A(t) = ((gamma+1)/2) * (1 + omega*t)                      quadratic speed
    B(t) = (3/4)(gamma+1) u^2 (1 + beta*rho0 - 2*alpha*beta*(rho0/a0)^2)
                                                              cubic speed (direct mode)
    g(t) = gamma*theta*a0 / (4*(1 - beta*rho0))               attenuation
    c    = 1/2                                                gravity forcing

where rho0, a0 are the stratification profiles evaluated at the wavefront
height and u = |grad phi| = 1 + omega*t.  Two cubic modes exist: ``direct``
evaluates the expression above; ``assembled`` rebuilds B = -Lambda/2 from
the material cubic coefficient, which lacks the (gamma+1) factor on the
alpha*beta term.  Two attenuation forms exist: ``derived`` (above, the
profile-consistent form) and ``alt``, a retained variant with exponent
theta instead of theta/omega in the denominator, kept for comparison.

The method of characteristics solves the equation label-by-label:

    d xi/dt   = A sigma - B sigma^2          d sigma/dt   = -g sigma - c
    d xi_eta/dt = (A - 2 B sigma) sigma_eta  d sigma_eta/dt = -g sigma_eta

The Jacobian xi_eta of the label map detects gradient blow-up: the wave
breaks at the first time min_eta xi_eta reaches zero.  Fixed closed-form
Jacobian expressions for sine initial data are retained verbatim for
comparison; they are known to disagree with the variational system, which
is the ground truth (see :func:`jacobian_discrepancy_report`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import atmosphere as atm
from .atmosphere import OMEGA_EPS, THETA_EPS, AtmosphereParams
from .errors import DomainError, NumericalError
from .thermo import GasParams, cubic_coefficient, quadratic_coefficient_scaled

__all__ = [
    "TransportCoeffs",
    "CoeffProvider",
    "coeffs",
    "sigma_closed",
    "sigma_ode",
    "source_factors",
    "InitialProfile",
    "sine_profile",
    "CharacteristicBundle",
    "make_bundle",
    "advance_characteristics",
    "breaking_time",
    "BreakingResult",
    "sample_characteristics",
    "jacobian_closed_form",
    "jacobian_closed_form_theta0",
    "jacobian_closed_form_omega_limit",
    "jacobian_discrepancy_report",
]


@dataclass(frozen=True)
class TransportCoeffs:
    """Evolution-equation coefficients at one instant."""

    A: float
    B: float
    g: float
    c: float


@dataclass(frozen=True)
class CoeffProvider:
    """Time-dependent coefficient functions for one parameter set.

    ``include_cubic`` / ``include_source`` / ``include_forcing`` zero the
    corresponding term; used for the quadratic-flux comparison experiments.
    """

    gas: GasParams
    atmos: AtmosphereParams
    mode: str = "direct"          # direct | assembled
    g_form: str = "derived"       # derived | alt
    include_cubic: bool = True
    include_source: bool = True
    include_forcing: bool = True

    def __post_init__(self):
        if self.mode not in ("direct", "assembled"):
            raise DomainError(f"unknown cubic mode {self.mode!r}")
        if self.g_form not in ("derived", "alt"):
            raise DomainError(f"unknown attenuation form {self.g_form!r}")
        if self.g_form == "alt" and self.atmos.omega < OMEGA_EPS:
            raise DomainError("the alt attenuation form requires omega > 0")

    def A(self, t):
        return quadratic_coefficient_scaled(self.gas) * atm.grad_phi_norm_at(self.atmos, t)

    def B(self, t):
        if not self.include_cubic:
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        gas, ap = self.gas, self.atmos
        x3 = atm.height_at(ap, t)
        rho0, a0 = atm.profiles(ap, x3)
        u = atm.grad_phi_norm_at(ap, t)
        if self.mode == "direct":
            return (
                0.75 * (gas.gamma + 1.0) * u**2
                * (1.0 + gas.beta * rho0 - 2.0 * gas.alpha * gas.beta * (rho0 / a0) ** 2)
            )
        lam = cubic_coefficient(gas, rho0, a0, u)
        return -0.5 * lam

    def g(self, t):
        if not self.include_source:
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        if self.g_form == "derived":
            return atm.chi(self.gas, self.atmos, t, mean_curvature=0.0)
        gas, ap = self.gas, self.atmos
        u = np.asarray(1.0 + ap.omega * np.asarray(t, dtype=float))
        denom = u**ap.theta - gas.beta
        if np.any(denom <= 0.0):
            raise DomainError("alt attenuation denominator is nonpositive")
        out = gas.gamma * ap.theta * u ** (ap.theta / ap.omega - 1.0) / (4.0 * denom)
        return float(out) if out.ndim == 0 else out

    def c(self, t=None):
        return 0.5 if self.include_forcing else 0.0

    def at(self, t: float) -> TransportCoeffs:
        return TransportCoeffs(
            A=float(self.A(t)), B=float(self.B(t)), g=float(self.g(t)), c=self.c()
        )


def coeffs(gas: GasParams, ap: AtmosphereParams, t: float, mode: str = "direct") -> TransportCoeffs:
    """Evolution-equation coefficients at time t."""
    return CoeffProvider(gas, ap, mode=mode).at(t)


# ---------------------------------------------------------------------------
# Amplitude along a characteristic
# ---------------------------------------------------------------------------


def sigma_closed(gas: GasParams, ap: AtmosphereParams, sigma0: float, t, t_start: float = 0.0):
    """Amplitude along a characteristic, closed form (exact at beta = 0).

    Integrating factor of d sigma/dt = -g(t) sigma - 1/2 expanded to first
    order in beta; the beta = 0 part is exact and anchoring at a general
    ``t_start`` keeps it an exact restart of the same equation.  Accepts an
    array of output times.
    """
    ga, be = gas.gamma, gas.beta
    th, om = ap.theta, ap.omega
    t = np.asarray(t, dtype=float)

    if th < THETA_EPS:
        out = sigma0 - 0.5 * (t - t_start)  # g == 0 exactly
        return float(out) if out.ndim == 0 else out

    if om < OMEGA_EPS:
        # mu = exp(gamma*theta*t/4) * (1 - (gamma*beta/4) exp(-theta*t)) + O(beta^2)
        p = np.exp(0.25 * ga * th * t)
        q = np.exp(-th * t)
        q0 = math.exp(-th * t_start)
        ratio = math.exp(0.25 * ga * th * t_start) / p
        j_p = (4.0 / (ga * th)) * (1.0 - ratio)
        e2 = (0.25 * ga - 1.0) * th  # exponent of mu^(0)*Q; gamma < 4 keeps it nonzero
        j_pq = (np.exp(e2 * t) - math.exp(e2 * t_start)) / (e2 * p)
    else:
        k = ga * th / (4.0 * om)
        m = th / om
        u = 1.0 + om * t
        u0 = 1.0 + om * t_start
        ratio = (u0 / u) ** k  # mu0/mu at leading order
        q = u**-m
        q0 = u0**-m
        j_p = (u - u0 ** (1.0 + k) * u**-k) / (om * (1.0 + k))
        if abs(1.0 + k - m) > 1e-10:
            i_km = (u ** (1.0 + k - m) - u0 ** (1.0 + k - m)) / (1.0 + k - m)
        else:
            i_km = np.log(u / u0)
        j_pq = i_km / (om * u**k)

    base = sigma0 * ratio - 0.5 * j_p
    corr = 0.25 * ga * be * (sigma0 * ratio * (q - q0) - 0.5 * (q * j_p - j_pq))
    out = base + corr
    return float(out) if out.ndim == 0 else out


def sigma_ode(
    gas: GasParams,
    ap: AtmosphereParams,
    sigma0: float,
    t,
    t_start: float = 0.0,
    tol: float = 1e-10,
    provider: CoeffProvider | None = None,
):
    """Amplitude along a characteristic by adaptive integration (production path)."""
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    if provider is None:
        provider = CoeffProvider(gas, ap)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    order = np.argsort(t_arr)
    t_sorted = t_arr[order]
    if t_sorted[0] < t_start:
        raise DomainError("output times must not precede t_start")

    def rhs(tt, y):
        return [-provider.g(tt) * y[0] - provider.c()]

    t_end = float(t_sorted[-1]) if t_sorted[-1] > t_start else t_start
    if t_end == t_start:
        vals = np.full_like(t_sorted, sigma0)
    else:
        sol = solve_ivp(
            rhs, (t_start, t_end), [sigma0], method="RK45",
            rtol=tol, atol=tol * 1e-2, dense_output=True,
        )
        if not sol.success:
            raise NumericalError(f"amplitude integration failed: {sol.message}")
        vals = sol.sol(t_sorted)[0]
        vals = np.where(t_sorted == t_start, sigma0, vals)
    out = np.empty_like(vals)
    out[order] = vals
    return float(out[0]) if np.ndim(t) == 0 else out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _integrate_gl(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    if b == a:
        return 0.0
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = mid + half * _GL_NODES
    return float(half * np.sum(_GL_WEIGHTS * f(x)))


def source_factors(provider: CoeffProvider, t0: float, t1: float) -> tuple[float, float]:
    """Exact affine solution map of d sigma/dt = -g(t) sigma - c over [t0, t1].

    Returns (E, D) with sigma(t1) = E*sigma(t0) + D.  The attenuation
    integral and the forced particular solution are evaluated by fixed
    Gauss-Legendre quadrature, machine-accurate for the smooth g used here.
    """
    g_total = _integrate_gl(lambda x: np.asarray(provider.g(x)), t0, t1)
    e_fac = math.exp(-g_total)
    c_val = provider.c()
    if c_val == 0.0:
        return e_fac, 0.0

    def weight(tau_arr):
        # exp(G(tau) - G(t1)) for each tau, inner integrals by nested GL
        vals = np.empty_like(tau_arr)
        for i, tau in enumerate(tau_arr):
            g_tail = _integrate_gl(lambda x: np.asarray(provider.g(x)), tau, t1)
            vals[i] = math.exp(-g_tail)
        return vals

    d_val = -c_val * _integrate_gl(weight, t0, t1)
    return e_fac, d_val


# ---------------------------------------------------------------------------
# Characteristic bundle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InitialProfile:
    """Initial amplitude profile with analytic derivative and compact support."""

    support: tuple[float, float]
    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]


def sine_profile(support: tuple[float, float] = (0.0, math.pi)) -> InitialProfile:
    """sin(eta) inside the support, zero outside."""
    lo, hi = support

    def f(eta):
        eta = np.asarray(eta, dtype=float)
        return np.where((eta > lo) & (eta < hi), np.sin(eta), 0.0)

    def df(eta):
        eta = np.asarray(eta, dtype=float)
        return np.where((eta > lo) & (eta < hi), np.cos(eta), 0.0)

    return InitialProfile(support=(lo, hi), f=f, df=df)


@dataclass(frozen=True)
class CharacteristicBundle:
    """Per-label state of the characteristic system at one time.

    ``jac`` is the label-map Jacobian xi_eta; ``sigma_eta`` its companion.
    ``n_ghost`` labels at each end sit outside the initial support.
    """

    eta: np.ndarray
    xi: np.ndarray
    sigma: np.ndarray
    jac: np.ndarray
    sigma_eta: np.ndarray
    t: float
    t_start: float
    n_ghost: int = 1


def make_bundle(
    profile: InitialProfile,
    t_start: float = 0.0,
    n_eta: int = 4097,
    pad: float = 0.0,
) -> CharacteristicBundle:
    """Uniform label grid over the support (plus ghosts / optional padding).

    ``pad`` widens the label range beyond the support at the grid spacing,
    which is needed when the bundle must cover a spatial window larger than
    the initial support.
    """
    lo, hi = profile.support
    d_eta = (hi - lo) / (n_eta - 1)
    n_pad = max(1, int(math.ceil(pad / d_eta)))  # >= 1 ghost label per side
    eta = np.concatenate(
        [
            lo - d_eta * np.arange(n_pad, 0, -1),
            np.linspace(lo, hi, n_eta),
            hi + d_eta * np.arange(1, n_pad + 1),
        ]
    )
    return CharacteristicBundle(
        eta=eta,
        xi=eta.copy(),
        sigma=profile.f(eta),
        jac=np.ones_like(eta),
        sigma_eta=profile.df(eta),
        t=t_start,
        t_start=t_start,
        n_ghost=n_pad,
    )


def _bundle_rhs(provider: CoeffProvider, n: int):
    def rhs(t, y):
        sg = y[n : 2 * n]
        se = y[3 * n :]
        a_val = float(provider.A(t))
        b_val = float(provider.B(t))
        g_val = float(provider.g(t))
        c_val = provider.c()
        return np.concatenate(
            [
                a_val * sg - b_val * sg**2,
                -g_val * sg - c_val,
                (a_val - 2.0 * b_val * sg) * se,
                -g_val * se,
            ]
        )

    return rhs


def advance_characteristics(
    bundle: CharacteristicBundle,
    provider: CoeffProvider,
    t_end: float,
    tol: float = 1e-10,
) -> CharacteristicBundle:
    """Advance the whole bundle to ``t_end`` (labels evolve independently)."""
    if t_end == bundle.t:
        return bundle
    if t_end < bundle.t:
        raise DomainError("cannot advance a bundle backwards")
    n = bundle.eta.size
    y0 = np.concatenate([bundle.xi, bundle.sigma, bundle.jac, bundle.sigma_eta])
    sol = solve_ivp(
        _bundle_rhs(provider, n), (bundle.t, t_end), y0,
        method="RK45", rtol=tol, atol=tol * 1e-2,
    )
    if not sol.success:
        raise NumericalError(f"characteristic integration failed: {sol.message}")
    y = sol.y[:, -1]
    return replace(
        bundle,
        xi=y[:n], sigma=y[n : 2 * n], jac=y[2 * n : 3 * n], sigma_eta=y[3 * n :],
        t=t_end,
    )


def sample_characteristics(bundle: CharacteristicBundle, xi_points: np.ndarray) -> np.ndarray:
    """Interpolate sigma(xi) from a pre-breaking bundle onto given points.

    Requires the label map to be monotone (min jac > 0); points outside the
    bundle's xi range receive the background (outside-support) amplitude.
    """
    if np.min(bundle.jac) <= 0.0:
        raise DomainError("bundle is past breaking; the label map is not invertible")
    xi, sg = bundle.xi, bundle.sigma
    if not np.all(np.diff(xi) > 0.0):
        raise NumericalError("label map is not strictly increasing")
    return np.interp(xi_points, xi, sg, left=sg[0], right=sg[-1])


# ---------------------------------------------------------------------------
# Breaking detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BreakingResult:
    """Outcome of breaking detection over [t_start, t_max]."""

    t_break: float | None
    eta_star: float | None
    min_jac: float
    boundary_warning: bool = False


def _integrate_single_label(
    provider: CoeffProvider,
    profile: InitialProfile,
    eta: float,
    t_start: float,
    t_max: float,
    tol: float,
):
    """Event-integrate one label; returns (t_break or None, jac at stop)."""
    y0 = [eta, float(profile.f(eta)), 1.0, float(profile.df(eta))]

    def rhs(t, y):
        a_val = float(provider.A(t))
        b_val = float(provider.B(t))
        g_val = float(provider.g(t))
        return [
            a_val * y[1] - b_val * y[1] ** 2,
            -g_val * y[1] - provider.c(),
            (a_val - 2.0 * b_val * y[1]) * y[3],
            -g_val * y[3],
        ]

    def event(t, y):
        return y[2]

    event.terminal = True
    event.direction = -1
    sol = solve_ivp(rhs, (t_start, t_max), y0, method="RK45",
                    rtol=tol, atol=tol * 1e-2, events=event)
    if not sol.success:
        raise NumericalError(f"single-label integration failed: {sol.message}")
    tb = float(sol.t_events[0][0]) if sol.t_events[0].size else None
    return tb, float(sol.y[2, -1])


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def breaking_time(
    gas: GasParams,
    ap: AtmosphereParams,
    profile: InitialProfile,
    t_start: float = 0.0,
    t_max: float = 10.0,
    n_eta: int = 4097,
    tol: float = 1e-10,
    provider: CoeffProvider | None = None,
    refine: bool = True,
) -> BreakingResult:
    """First time the label-map Jacobian vanishes, or None by ``t_max``.

    Event detection on min_eta xi_eta over the bundle locates the sign
    change (root refined well below 1e-6 by the integrator's event solver);
    a golden-section pass around the minimizing label then re-detects on the
    refined label.  A warning flags a minimizer at the support boundary.
    """
    if provider is None:
        provider = CoeffProvider(gas, ap)
    bundle = make_bundle(profile, t_start, n_eta=n_eta)
    n = bundle.eta.size

    def event(t, y):
        return float(np.min(y[2 * n : 3 * n]))

    event.terminal = True
    event.direction = -1
    y0 = np.concatenate([bundle.xi, bundle.sigma, bundle.jac, bundle.sigma_eta])
    sol = solve_ivp(
        _bundle_rhs(provider, n), (t_start, t_max), y0,
        method="RK45", rtol=tol, atol=tol * 1e-2, events=event,
    )
    if not sol.success:
        raise NumericalError(f"bundle integration failed: {sol.message}")
    if not sol.t_events[0].size:
        return BreakingResult(
            t_break=None, eta_star=None,
            min_jac=float(np.min(sol.y[2 * n : 3 * n, -1])),
        )

    t_grid = float(sol.t_events[0][0])
    y_ev = sol.y_events[0][0]
    jac_ev = y_ev[2 * n : 3 * n]
    idx = int(np.argmin(jac_ev))
    eta_star = float(bundle.eta[idx])
    d_eta = float(bundle.eta[1] - bundle.eta[0])
    lo_sup, hi_sup = profile.support

    def near_support_edge(eta_val: float) -> bool:
        return min(eta_val - lo_sup, hi_sup - eta_val) <= 1.5 * d_eta

    if not refine:
        boundary = near_support_edge(eta_star)
        if boundary:
            warnings.warn(
                "breaking minimizer abuts the support boundary; the detected "
                "time converges from above under label refinement",
                stacklevel=2,
            )
        return BreakingResult(t_grid, eta_star, 0.0, boundary)

    # golden-section in eta around the grid argmin, objective = jac at t_grid
    lo = bundle.eta[max(0, idx - 1)]
    hi = bundle.eta[min(n - 1, idx + 1)]

    def jac_at(eta_val: float) -> float:
        _, jac_end = _integrate_single_label(
            provider, profile, eta_val, t_start, t_grid, tol
        )
        return jac_end

    a_pt, b_pt = lo, hi
    c_pt = b_pt - _GOLDEN * (b_pt - a_pt)
    d_pt = a_pt + _GOLDEN * (b_pt - a_pt)
    f_c, f_d = jac_at(c_pt), jac_at(d_pt)
    for _ in range(24):
        if b_pt - a_pt < 1e-7 * max(1.0, d_eta):
            break
        if f_c < f_d:
            b_pt, d_pt, f_d = d_pt, c_pt, f_c
            c_pt = b_pt - _GOLDEN * (b_pt - a_pt)
            f_c = jac_at(c_pt)
        else:
            a_pt, c_pt, f_c = c_pt, d_pt, f_d
            d_pt = a_pt + _GOLDEN * (b_pt - a_pt)
            f_d = jac_at(d_pt)
    eta_ref = 0.5 * (a_pt + b_pt)
    t_ref, _ = _integrate_single_label(provider, profile, eta_ref, t_start, t_max, tol)
    t_break = min(t_grid, t_ref) if t_ref is not None else t_grid
    boundary = near_support_edge(eta_ref)
    if boundary:
        warnings.warn(
            "breaking minimizer abuts the support boundary; the detected "
            "time converges from above under label refinement",
            stacklevel=2,
        )
    return BreakingResult(t_break, eta_ref, 0.0, boundary)


# ---------------------------------------------------------------------------
# Closed-form Jacobians for sine initial data (comparison only)
# ---------------------------------------------------------------------------


def jacobian_closed_form(eta, t, gas: GasParams, ap: AtmosphereParams):
    """Fixed closed-form Jacobian for sine data anchored at t = 0.

    Retained verbatim for comparison; the variational system is the ground
    truth and the two disagree beyond their shared t = 0 value (see
    :func:`jacobian_discrepancy_report`).  Requires omega > 0.
    """
    ga, al, be = gas.gamma, gas.alpha, gas.beta
    th, om = ap.theta, ap.omega
    if om < OMEGA_EPS:
        raise DomainError("general closed form requires omega > 0")
    eta = np.asarray(eta, dtype=float)
    u = 1.0 + om * t
    c = np.cos(eta)
    s = np.sin(eta)
    m = th / om
    terms = (
        (u ** (6.0 - m * (2.0 + ga / 4.0)) - 1.0) / (24.0 * om - th * (8.0 + ga))
        * (-24.0 * al * be * c / (ga * th + 4.0 * om)),
        (u ** (5.0 - m * (2.0 + ga / 4.0)) - 1.0) / (20.0 * om - th * (8.0 + ga))
        * (24.0 * al * be * c / (ga * th + 4.0 * om) + 12.0 * al * be * c * s),
        -(u ** (4.0 - m * (2.0 + ga / 4.0)) - 1.0) / (16.0 * om - th * (8.0 + ga))
        * (ga / (ga * (th - 4.0) + 4.0 * om) - 2.0 * (2.0 + ga) / (ga * th + 4.0 * om))
        * (1.0 + ga) * be * c,
        -(u ** (3.0 - m * (1.0 + ga / 2.0)) - 1.0) / (6.0 * om - th * (2.0 + ga))
        * (ga / (ga * (th - 4.0) + 4.0 * om) - 2.0 * (2.0 + ga) / (ga * th + 4.0 * om))
        * (1.0 + ga) * be * c,
        (u ** (2.0 - m * (1.0 + ga / 2.0)) - 1.0) / (4.0 * om - th * (2.0 + ga))
        * ((1.0 + ga) * ga * be / 8.0) * c,
        (u ** (4.0 - ga * th / (4.0 * om)) - 1.0) / (16.0 * om - ga * th)
        * ((4.0 - ga * be) / (ga * th + 4.0 * om)) * 3.0 * (ga + 1.0) * c,
        (u ** (3.0 - ga * th / (4.0 * om)) - 1.0) / (12.0 * om - ga * th)
        * (ga * be / ((ga - 4.0) * th + 4.0 * om)) * 3.0 * (ga + 1.0) * c,
        (u ** (2.0 - ga * th / (4.0 * om)) - 1.0) / (8.0 * om - ga * th)
        * (1.0 - ga * be / 4.0) * 2.0 * (ga + 1.0) * c,
        -(u ** (3.0 - ga * th / (2.0 * om)) - 1.0) / (6.0 * om - ga * th)
        * ((4.0 - ga * be) / (ga * th + 4.0 * om) + 2.0 * s * (1.0 - ga * be / 2.0))
        * (3.0 * (1.0 + ga) * c / 2.0),
    )
    return sum(terms) + 1.0


def jacobian_closed_form_theta0(eta, t, gas: GasParams, ap: AtmosphereParams):
    """Constant-density closed form (theta = 0), polynomial in t.

    Retained verbatim including its t = 0 value of 2 (the variational
    Jacobian is 1 there); comparison only.
    """
    ga, al, be = gas.gamma, gas.alpha, gas.beta
    om = ap.omega
    eta = np.asarray(eta, dtype=float)
    c = np.cos(eta)
    s = np.sin(eta)
    return (
        t**6 * (-(om / 2.0) * al * be * c)
        + t**5 * ((6.0 / 5.0) * (om * c - 2.0) * om**3 * al * be)
        + t**4 * ((1.0 + ga) * (1.0 + be) / 8.0 - 1.5 * al * be + 2.0 * s * al * be * om)
        * 3.0 * om**2 * c
        + t**3 * ((1.0 + ga) * (1.0 + be) * (1.0 - om * s) - 4.0 * al * be * (1.0 - 3.0 * om * s))
        * om * c
        + t**2 * (
            3.0 * (1.0 + ga) * (1.0 + be) * (0.25 - om * s)
            - 3.0 * al * be * (0.5 - 4.0 * om * s)
            + om * (1.0 + ga) / 2.0
        ) * c
        + t * (6.0 * s * (al * be - (1.0 + ga) * (1.0 + be) / 2.0) + (1.0 + ga)) * c
        + 2.0
    )


def jacobian_closed_form_omega_limit(eta, t, gas: GasParams, ap: AtmosphereParams):
    """Vanishing sound-speed-gradient closed form (omega -> 0 limit).

    Uses lim (1+omega*t)^(-gamma*theta/(4*omega)) = exp(-gamma*theta*t/4).
    Retained verbatim; comparison only.  Requires theta > 0.
    """
    ga, al, be = gas.gamma, gas.alpha, gas.beta
    th = ap.theta
    if th < THETA_EPS:
        raise DomainError("omega-limit closed form requires theta > 0")
    eta = np.asarray(eta, dtype=float)
    c = np.cos(eta)
    s = np.sin(eta)
    return (
        (1.0 - np.exp(-th * (2.0 + ga / 4.0) * t)) * 3.0 * c / (th * (8.0 + ga))
        * (
            4.0 * al * ((2.0 / (ga * th)) * (1.0 - be) + s)
            - (1.0 + ga) * be * (th / (ga - 4.0) - 2.0 * (2.0 - ga) / (ga * th))
        )
        + (1.0 - np.exp(-th * (1.0 + ga / 2.0) * t)) * be * c / (2.0 * th * (2.0 + ga))
        * (-3.0 * (2.0 + ga) * (2.0 / (ga * th) + s) + ga / 4.0)
        + (1.0 - np.exp(-th * ga * t / 4.0)) * (1.0 + ga) * c / (ga * th)
        * (
            3.0 * (4.0 - ga * be) / (ga * th)
            + 3.0 * ga * be / (th * (ga - 4.0))
            + 2.0 * (1.0 - ga * be / 4.0)
        )
        - (1.0 - np.exp(-th * ga * t / 2.0)) * 3.0 * (1.0 + ga) * c / (2.0 * ga * th)
        * ((4.0 - ga * be) / (ga * th) + 2.0 * s * (1.0 - ga * be / 2.0))
        + 1.0
    )


def jacobian_discrepancy_report(
    gas: GasParams,
    ap: AtmosphereParams,
    t: float = 1.4,
    n_eta: int = 513,
    tol: float = 1e-9,
) -> dict:
    """Quantify closed-form vs variational Jacobian disagreement at one time.

    The report records the maximum absolute difference over the support, the
    closed forms' anchor values at t = 0 (the constant-density variant
    returns 2 where the variational value is 1) and the omega -> 0 limit
    consistency of the general form.
    """
    profile = sine_profile()
    provider = CoeffProvider(gas, ap)
    bundle = make_bundle(profile, 0.0, n_eta=n_eta)
    bundle = advance_characteristics(bundle, provider, t, tol=tol)
    sl = slice(bundle.n_ghost, bundle.eta.size - bundle.n_ghost)
    eta = bundle.eta[sl]
    jac_var = bundle.jac[sl]

    report: dict = {"t": t}
    if ap.omega >= OMEGA_EPS:
        jac_cf = jacobian_closed_form(eta, t, gas, ap)
        report["max_abs_diff_general"] = float(np.max(np.abs(jac_cf - jac_var)))
        report["general_at_t0"] = float(
            np.max(np.abs(jacobian_closed_form(eta, 0.0, gas, ap) - 1.0))
        )
        if ap.theta >= THETA_EPS:
            small = AtmosphereParams(theta=ap.theta, omega=1e-6)
            lim_general = jacobian_closed_form(eta, t, gas, small)
            lim_form = jacobian_closed_form_omega_limit(eta, t, gas, ap)
            report["omega_limit_max_abs_diff"] = float(
                np.max(np.abs(lim_general - lim_form))
            )
    theta0 = AtmosphereParams(theta=0.0, omega=ap.omega if ap.omega > 0 else 0.1)
    report["theta0_at_t0"] = float(
        np.max(np.abs(jacobian_closed_form_theta0(eta, 0.0, gas, theta0)))
    )
    return report
