"""Exponentially stratified background and the vertical acoustic ray.

Density and sound speed decay with height x3:

    rho0(x3) = exp(-theta*x3),    a0(x3) = exp(-omega*x3)

A disturbance launched on the plane x3 = 0 with unit upward normal stays a
vertical plane wave; the phase solves the eikonal equation and has the
closed form grad phi = (0, 0, 1 + omega*t), x3 = ln(1 + omega*t)/omega.
The removable omega -> 0 limit (x3 = t) is branch-switched analytically.

Entropy varies with height through the leading-order equilibrium condition
grad p = 0, which fixes  s0' = -a0^2 rho0' / p_s  and hence the attenuation
coefficient chi of the amplitude equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NumericalError
from .thermo import GasParams, eos_derivatives

__all__ = [
    "AtmosphereParams",
    "PhaseState",
    "OMEGA_EPS",
    "profiles",
    "phase_closed_form",
    "trace_ray",
    "entropy_gradient_term",
    "entropy_gradient_term_from_eos",
    "chi",
]

OMEGA_EPS = 1e-10  # below this the omega -> 0 series branch is used
THETA_EPS = 1e-10


@dataclass(frozen=True)
class AtmosphereParams:
    """Attenuation rates of the stratification (both >= 0)."""

    theta: float
    omega: float

    def __post_init__(self):
        if self.theta < 0.0 or self.omega < 0.0:
            raise DomainError("attenuation rates must be nonnegative")


@dataclass(frozen=True)
class PhaseState:
    """Phase gradient and wavefront height along the vertical ray."""

    t: float
    x3: float
    grad_phi: np.ndarray

    @property
    def n(self) -> np.ndarray:
        return self.grad_phi / np.linalg.norm(self.grad_phi)

    @property
    def grad_phi_norm(self) -> float:
        return float(np.linalg.norm(self.grad_phi))


def profiles(ap: AtmosphereParams, x3):
    """Background (rho0, a0) at height x3; accepts arrays."""
    x3 = np.asarray(x3, dtype=float)
    out = (np.exp(-ap.theta * x3), np.exp(-ap.omega * x3))
    if out[0].ndim == 0:
        return float(out[0]), float(out[1])
    return out


def height_at(ap: AtmosphereParams, t):
    """Wavefront height x3(t), with the analytic omega -> 0 limit x3 = t."""
    t = np.asarray(t, dtype=float)
    if ap.omega < OMEGA_EPS:
        x3 = t
    else:
        x3 = np.log1p(ap.omega * t) / ap.omega
    return float(x3) if x3.ndim == 0 else x3


def grad_phi_norm_at(ap: AtmosphereParams, t):
    """|grad phi| along the ray: 1 + omega*t."""
    t = np.asarray(t, dtype=float)
    out = 1.0 + ap.omega * t
    return float(out) if out.ndim == 0 else out


def phase_closed_form(ap: AtmosphereParams, t: float) -> PhaseState:
    """Closed-form phase state at time t for the ascending plane wave."""
    if 1.0 + ap.omega * t <= 0.0:
        raise DomainError(f"1 + omega*t must stay positive, got t={t}")
    return PhaseState(
        t=t,
        x3=height_at(ap, t),
        grad_phi=np.array([0.0, 0.0, 1.0 + ap.omega * t]),
    )


def trace_ray(
    ap: AtmosphereParams, t_end: float, dt: float, tol: float = 1e-10
) -> list[PhaseState]:
    """Integrate the ray equations from x3 = 0, grad phi = (0,0,1).

    d x / dtau = a0(x3) * grad phi / |grad phi|
    d (d_i phi) / dtau = -|grad phi| * a0'(x3) * delta_{i3}

    Returns the path sampled every ``dt`` (plus the endpoint).  The
    integrator is an adaptive embedded Runge-Kutta pair at tolerance ``tol``.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")

    def rhs(t, y):
        x3, p1, p2, p3 = y
        norm = math.sqrt(p1 * p1 + p2 * p2 + p3 * p3)
        a0 = math.exp(-ap.omega * x3)
        a0p = -ap.omega * a0
        return [a0 * p3 / norm, 0.0, 0.0, -norm * a0p]

    n_steps = int(math.floor(t_end / dt + 1e-9))
    t_eval = dt * np.arange(n_steps + 1)
    if t_eval[-1] > t_end or t_end - t_eval[-1] < 1e-12 * max(1.0, t_end):
        t_eval[-1] = t_end
    else:
        t_eval = np.append(t_eval, t_end)
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        [0.0, 0.0, 0.0, 1.0],
        method="RK45",
        rtol=tol,
        atol=tol * 1e-2,
        t_eval=t_eval,
        dense_output=False,
    )
    if not sol.success:
        raise NumericalError(f"ray integration failed: {sol.message}")
    return [
        PhaseState(t=float(tt), x3=float(x3), grad_phi=np.array([p1, p2, p3]))
        for tt, x3, p1, p2, p3 in zip(sol.t, *sol.y)
    ]


def entropy_gradient_term(gas: GasParams, ap: AtmosphereParams, t) -> float:
    """a_s * s0' * n3 along the ray, from the equilibrium condition.

    Closed form gamma*theta*a0 / (2*(1 - beta*rho0)) evaluated at x3(t);
    covolume exclusion must hold at that height.
    """
    x3 = height_at(ap, t)
    rho0, a0 = profiles(ap, x3)
    denom = 1.0 - gas.beta * np.asarray(rho0)
    if np.any(denom <= 0.0):
        raise DomainError("covolume exclusion violated along the ray")
    out = gas.gamma * ap.theta * np.asarray(a0) / (2.0 * denom)
    return float(out) if out.ndim == 0 else out


def entropy_gradient_term_from_eos(gas: GasParams, ap: AtmosphereParams, t: float) -> float:
    """Cross-check route: (a_s/p_s) * (-a0^2 * rho0') from the EOS derivatives."""
    x3 = height_at(ap, t)
    rho0, a0 = profiles(ap, x3)
    d = eos_derivatives(gas, rho0, a0)
    rho0_prime = -ap.theta * rho0
    return (d.a_s / d.p_s) * (-(a0**2) * rho0_prime)


def entropy_height_derivative(gas: GasParams, ap: AtmosphereParams, t: float) -> float:
    """s0'(x3) from grad p = 0:  s0' = -a0^2 rho0' / p_s."""
    x3 = height_at(ap, t)
    rho0, a0 = profiles(ap, x3)
    d = eos_derivatives(gas, rho0, a0)
    return -(a0**2) * (-ap.theta * rho0) / d.p_s


def chi(gas: GasParams, ap: AtmosphereParams, t, mean_curvature: float = 0.0) -> float:
    """Attenuation coefficient chi = (a0 * div n + a_s * s0,_k n_k) / 2.

    ``mean_curvature`` is div n (zero for the plane wave of this geometry).
    """
    x3 = height_at(ap, t)
    _, a0 = profiles(ap, x3)
    return 0.5 * (np.asarray(a0) * mean_curvature + entropy_gradient_term(gas, ap, t))
