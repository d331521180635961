"""Hydrostatic balance: the stratified background density r(x3).

The background satisfies d/dx3 p(r, Theta) = -r g on [0, 1].  With Theta
constant this is the scalar ODE

    dr/dx3 = -r g / (dp/drho)(r, Theta),

integrated from a prescribed bottom density r(0) = r_bott (the initial-value
formulation pins down the otherwise non-unique hydrostatic family).  The
integrator is an adaptive embedded Runge-Kutta pair run far below the flow
solver's spatial accuracy, with its dense output sampled onto the uniform
vertical grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, StratificationCollapseError
from .thermo.eos import EquationOfState, ThermoState, pressure, thermo_partials
from .thermo.transport import TransportCoefficients

__all__ = [
    "StaticProfile",
    "BalanceResidual",
    "solve_static",
    "solve_static_general",
    "balance_residual",
    "viscosity_profile",
]

_ODE_ATOL = 1e-12
_ODE_RTOL = 1e-10


@dataclass(frozen=True)
class StaticProfile:
    """Hydrostatic background on the uniform vertical grid.

    grid_x3 holds the n_nodes node coordinates (0 and 1 included), r the
    density per node, theta_profile the temperature per node, g the gravity
    constant (potential G = -g x3).
    """

    grid_x3: np.ndarray
    r: np.ndarray
    theta_profile: np.ndarray
    g: float

    def __post_init__(self):
        if self.r.shape != self.grid_x3.shape or self.theta_profile.shape != self.grid_x3.shape:
            raise DomainError("profile arrays must share the grid shape")
        if not np.all(self.r > 0.0):
            raise DomainError("static profile density must stay positive")

    @property
    def r_min(self) -> float:
        return float(np.min(self.r))

    def save_table(self, path) -> None:
        """Two-column plain text (x3, r)."""
        np.savetxt(path, np.column_stack([self.grid_x3, self.r]), fmt="%.17g")


@dataclass(frozen=True)
class BalanceResidual:
    """max and discrete-L2 norms of d/dx3 p(r, Theta) + r g at interior nodes."""

    max: float
    l2: float


def _partials_at(eos, r, theta):
    return thermo_partials(eos, ThermoState(rho=r, theta=theta))


def solve_static(
    eos: EquationOfState,
    Theta: float,
    g: float,
    r_bott: float,
    n_nodes: int = 257,
) -> StaticProfile:
    """Integrate the constant-temperature hydrostatic ODE from the bottom plate.

    Raises StratificationCollapseError (with the failing height) if the
    density reaches zero, or thermodynamic stability fails, before x3 = 1.
    """
    if Theta <= 0.0 or r_bott <= 0.0:
        raise DomainError("Theta and r_bott must be positive")
    if n_nodes < 2:
        raise DomainError("need at least 2 vertical nodes")

    def rhs(x3, y):
        r = y[0]
        if r <= 0.0:
            raise StratificationCollapseError(x3, "density reached zero")
        dp_drho, _, _ = _partials_at(eos, r, Theta)
        return [-r * g / float(dp_drho)]

    def hit_zero(x3, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1

    sol = solve_ivp(
        rhs,
        (0.0, 1.0),
        [r_bott],
        method="RK45",
        rtol=_ODE_RTOL,
        atol=_ODE_ATOL,
        dense_output=True,
        events=hit_zero,
    )
    if sol.status == 1:  # terminated by the zero-density event
        raise StratificationCollapseError(float(sol.t_events[0][0]), "density reached zero")
    if not sol.success:
        raise StratificationCollapseError(float(sol.t[-1]), sol.message)

    x3 = np.linspace(0.0, 1.0, n_nodes)
    r = sol.sol(x3)[0]
    if np.any(r <= 0.0):
        bad = float(x3[np.argmax(r <= 0.0)])
        raise StratificationCollapseError(bad, "density reached zero")
    return StaticProfile(grid_x3=x3, r=r, theta_profile=np.full(n_nodes, float(Theta)), g=float(g))


def solve_static_general(
    eos: EquationOfState,
    Theta_of_x3: Callable[[float], float],
    g: float,
    r_bott: float,
    n_nodes: int = 257,
) -> StaticProfile:
    """Hydrostatic ODE with a prescribed C1 temperature profile Theta(x3):

        dp/drho * r' = -r g - dp/dtheta * Theta'(x3).

    Theta' is taken by centered differences of the callable.  Reduces to
    :func:`solve_static` when Theta is constant.
    """
    if r_bott <= 0.0:
        raise DomainError("r_bott must be positive")
    if n_nodes < 2:
        raise DomainError("need at least 2 vertical nodes")

    dx = 1e-6

    def theta_prime(x3):
        a = max(x3 - dx, 0.0)
        b = min(x3 + dx, 1.0)
        return (Theta_of_x3(b) - Theta_of_x3(a)) / (b - a)

    def rhs(x3, y):
        r = y[0]
        if r <= 0.0:
            raise StratificationCollapseError(x3, "density reached zero")
        th = Theta_of_x3(x3)
        if th <= 0.0:
            raise StratificationCollapseError(x3, "temperature profile reached zero")
        dp_drho, dp_dtheta, _ = _partials_at(eos, r, th)
        return [(-r * g - float(dp_dtheta) * theta_prime(x3)) / float(dp_drho)]

    def hit_zero(x3, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1

    sol = solve_ivp(
        rhs,
        (0.0, 1.0),
        [r_bott],
        method="RK45",
        rtol=_ODE_RTOL,
        atol=_ODE_ATOL,
        dense_output=True,
        events=hit_zero,
    )
    if sol.status == 1:
        raise StratificationCollapseError(float(sol.t_events[0][0]), "density reached zero")
    if not sol.success:
        raise StratificationCollapseError(float(sol.t[-1]), sol.message)

    x3 = np.linspace(0.0, 1.0, n_nodes)
    r = sol.sol(x3)[0]
    theta = np.array([Theta_of_x3(x) for x in x3], dtype=float)
    if np.any(r <= 0.0):
        bad = float(x3[np.argmax(r <= 0.0)])
        raise StratificationCollapseError(bad, "density reached zero")
    return StaticProfile(grid_x3=x3, r=r, theta_profile=theta, g=float(g))


def balance_residual(eos: EquationOfState, profile: StaticProfile) -> BalanceResidual:
    """Residual of the discrete hydrostatic balance, centered differences.

    Evaluates |D_h p(r, Theta) + r g| at interior nodes; returns the max and
    the discrete L2 norm (sqrt of h-weighted sum of squares).
    """
    x3 = profile.grid_x3
    h = x3[1] - x3[0]
    p = pressure(eos, ThermoState(rho=profile.r, theta=profile.theta_profile))
    dp = (p[2:] - p[:-2]) / (2.0 * h)
    res = dp + profile.r[1:-1] * profile.g
    return BalanceResidual(
        max=float(np.max(np.abs(res))) if res.size else 0.0,
        l2=float(np.sqrt(np.sum(res ** 2) * h)),
    )


def viscosity_profile(profile: StaticProfile, tc: TransportCoefficients) -> np.ndarray:
    """Kinematic viscosity per node: nu(x3) = mu(Theta(x3)) / r(x3).

    Positive and bounded away from zero because r is bounded and mu has a
    positive lower bound.
    """
    nu = np.asarray(tc.mu(profile.theta_profile), dtype=float) / profile.r
    if not np.all(nu > 0.0):
        raise DomainError("viscosity profile must be positive")
    return nu
