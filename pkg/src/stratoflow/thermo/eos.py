"""Equation of state for a monoatomic gas with radiation correction.

The pressure splits into a molecular part, generated by a single structural
function ``P`` of the reduced variable ``Z = rho / theta**1.5``, and a
radiative part ``(a/3) theta**4``:

    p(rho, theta) = theta**2.5 * P(Z) + (a/3) theta**4
    e(rho, theta) = 1.5 * theta**2.5 / rho * P(Z) + a * theta**4 / rho
    s(rho, theta) = S(Z) + (4a/3) theta**3 / rho

with S'(Z) = -1.5 * h(Z) / Z and h(Z) = (5/3 P(Z) - P'(Z) Z)/Z.  Everything
about a preset is therefore encoded in (P, P', S, h) plus the constants
``p_inf`` (high-compression coefficient of P(Z)/Z**(5/3)), ``a`` and the
empirical bound ``c_bound`` on h.

Three presets ship:

* ``ideal-monoatomic``  -- P(Z) = Z, the plain ideal gas p = rho*theta.
  Simple and exact, but its structural entropy -log(Z) does not vanish at
  high compression; the structural validator reports that honestly.
* ``third-law-compliant`` -- built from h(Z) = 2/(3(1+Z)), which gives the
  closed forms S(Z) = log(1 + 1/Z) and
  P(Z) = Z**(5/3) * (p_inf + integral_Z^inf h(s) s**(-5/3) ds).
  The integral has an elementary antiderivative (logs and one arctangent),
  evaluated directly; a convergent alternating series takes over for large Z
  where the antiderivative cancels catastrophically.
* ``tabulated``        -- P sampled in a two-column text table, interpolated
  by a monotone cubic so that P' keeps the sign of the data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import DomainError, ThermodynamicStabilityError

__all__ = [
    "EquationOfState",
    "ThermoState",
    "ideal_monoatomic",
    "third_law_compliant",
    "tabulated",
    "load_structural_table",
    "pressure",
    "internal_energy",
    "entropy",
    "thermo_partials",
]

_SERIES_SPLIT = 2.0  # switch from antiderivative to series evaluation of the tail integral
_SERIES_TERMS = 96


@dataclass(frozen=True)
class ThermoState:
    """Pointwise or field-valued thermodynamic state (rho, theta), both > 0."""

    rho: np.ndarray | float
    theta: np.ndarray | float

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        if not np.all(rho > 0.0):
            raise DomainError("mass density must be positive")
        if not np.all(theta > 0.0):
            raise DomainError("absolute temperature must be positive")


@dataclass(frozen=True)
class EquationOfState:
    """Immutable bundle of structural functions; safe to share between threads.

    ``P``, ``P_prime`` and ``S_structural`` accept and return numpy arrays.
    ``c_bound`` is the bound against which the validator checks h(Z).
    """

    preset: str
    p_inf: float
    a: float
    c_bound: float
    P: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    P_prime: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    S_structural: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def h(self, Z):
        """h(Z) = (5/3 P(Z) - P'(Z) Z) / Z, the structural stability gauge."""
        Z = np.asarray(Z, dtype=float)
        return (5.0 / 3.0) * self.P(Z) / Z - self.P_prime(Z)


def _tail_integral_compliant(Z):
    """integral_Z^inf 2/(3(1+s)) s**(-5/3) ds, exact up to round-off.

    Substituting s = Z/t reduces the tail to a finite integral with the
    elementary antiderivative used below; beyond Z = 2 the alternating
    expansion in 1/Z is both faster and immune to cancellation.
    """
    Z = np.asarray(Z, dtype=float)
    out = np.empty_like(Z)

    small = Z <= _SERIES_SPLIT
    if np.any(small):
        z = Z[small]
        c = np.cbrt(z)
        s3 = np.sqrt(3.0)
        # Q(Z) = int_0^1 v / (v^3 + Z) dv by partial fractions over v^3 + c^3
        Q = (
            -np.log1p(c) / (3.0 * c)
            + np.log(1.0 - c + c * c) / (6.0 * c)
            + (np.arctan((2.0 - c) / (c * s3)) + np.pi / 6.0) / (c * s3)
        )
        J = 1.5 - 3.0 * z * Q
        out[small] = (2.0 / 3.0) * z ** (-2.0 / 3.0) * J
    large = ~small
    if np.any(large):
        z = Z[large]
        acc = np.zeros_like(z)
        zk = z ** (-5.0 / 3.0)
        sign = 1.0
        for k in range(_SERIES_TERMS):
            acc += sign * zk / (5.0 / 3.0 + k)
            zk = zk / z
            sign = -sign
        out[large] = (2.0 / 3.0) * acc
    return out


def ideal_monoatomic(a: float = 0.0) -> EquationOfState:
    """P(Z) = Z: reduces to p = rho*theta (+ radiation). S(Z) = -log Z, zero at Z=1."""
    return EquationOfState(
        preset="ideal-monoatomic",
        p_inf=1.0,
        a=float(a),
        c_bound=2.0 / 3.0,
        P=lambda Z: np.asarray(Z, dtype=float),
        P_prime=lambda Z: np.ones_like(np.asarray(Z, dtype=float)),
        S_structural=lambda Z: -np.log(np.asarray(Z, dtype=float)),
    )


def third_law_compliant(p_inf: float = 1.0, a: float = 0.0) -> EquationOfState:
    """Preset satisfying every structural hypothesis, with h(Z) = 2/(3(1+Z)).

    S(Z) = log(1 + 1/Z) decays to zero at high compression and
    P(Z)/Z**(5/3) decreases to ``p_inf``.
    """
    if p_inf <= 0.0:
        raise DomainError("p_inf must be positive")
    p_inf = float(p_inf)

    def P(Z):
        Z = np.asarray(Z, dtype=float)
        out = np.zeros_like(Z)
        pos = Z > 0.0
        zp = Z[pos]
        out[pos] = zp ** (5.0 / 3.0) * (p_inf + _tail_integral_compliant(zp))
        return out

    def P_prime(Z):
        # From the defining ODE: P'(Z) = (5/3) P(Z)/Z - h(Z); P'(0+) = 1.
        Z = np.asarray(Z, dtype=float)
        out = np.ones_like(Z)
        pos = Z > 0.0
        zp = Z[pos]
        out[pos] = (5.0 / 3.0) * (zp ** (2.0 / 3.0) * (p_inf + _tail_integral_compliant(zp))) - 2.0 / (
            3.0 * (1.0 + zp)
        )
        return out

    return EquationOfState(
        preset="third-law-compliant",
        p_inf=p_inf,
        a=float(a),
        c_bound=2.0 / 3.0,
        P=P,
        P_prime=P_prime,
        S_structural=lambda Z: np.log1p(1.0 / np.asarray(Z, dtype=float)),
    )


def tabulated(z_values, p_values, a: float = 0.0, p_inf: float | None = None) -> EquationOfState:
    """EOS from a sampled (Z, P(Z)) table, monotone-cubic interpolated.

    The table must have strictly increasing Z; the interpolant preserves the
    monotonicity of the data, so P' > 0 holds wherever the samples increase.
    The structural entropy is fixed by S(1) = 0, integrating
    S'(Z) = -1.5 h(Z)/Z on a dense log grid spanning the table.
    """
    z = np.asarray(z_values, dtype=float)
    p = np.asarray(p_values, dtype=float)
    if z.ndim != 1 or z.shape != p.shape or z.size < 4:
        raise DomainError("structural table needs two equal-length columns with >= 4 rows")
    if not np.all(np.diff(z) > 0.0):
        raise DomainError("structural table must have strictly increasing Z")
    if z[0] < 0.0:
        raise DomainError("structural table Z values must be nonnegative")

    interp = PchipInterpolator(z, p, extrapolate=True)
    dinterp = interp.derivative()

    z_lo = max(z[0], 1e-12)
    z_hi = z[-1]
    zg = np.geomspace(max(z_lo, 1e-10), z_hi, 4001)
    hg = (5.0 / 3.0) * interp(zg) / zg - dinterp(zg)
    # cumulative trapezoid of S'(Z) = -1.5 h/Z in log Z:  dZ = Z dlogZ
    integrand = -1.5 * hg  # S'(Z) * Z
    logz = np.log(zg)
    s_cum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(logz))]
    )
    i1 = int(np.searchsorted(zg, 1.0))
    s_at_1 = np.interp(np.log(1.0), logz, s_cum) if zg[0] <= 1.0 <= zg[-1] else s_cum[0]
    s_grid = s_cum - s_at_1
    if p_inf is None:
        p_inf = float(interp(z_hi) / z_hi ** (5.0 / 3.0))

    def S_structural(Z):
        Z = np.asarray(Z, dtype=float)
        return np.interp(np.log(np.clip(Z, zg[0], zg[-1])), logz, s_grid)

    return EquationOfState(
        preset="tabulated",
        p_inf=float(p_inf),
        a=float(a),
        c_bound=float(np.max(hg)),
        P=lambda Z: interp(np.asarray(Z, dtype=float)),
        P_prime=lambda Z: dinterp(np.asarray(Z, dtype=float)),
        S_structural=S_structural,
    )


def load_structural_table(path, a: float = 0.0) -> EquationOfState:
    """Read a two-column plain-text (Z, P) table and build the tabulated preset."""
    data = np.loadtxt(path, dtype=float, ndmin=2)
    if data.shape[1] != 2:
        raise DomainError(f"{path}: expected two columns (Z, P), got {data.shape[1]}")
    return tabulated(data[:, 0], data[:, 1], a=a)


def _rt(state: ThermoState):
    rho = np.asarray(state.rho, dtype=float)
    theta = np.asarray(state.theta, dtype=float)
    if not np.all(rho > 0.0) or not np.all(theta > 0.0):
        raise DomainError("state requires rho > 0 and theta > 0")
    return rho, theta


def pressure(eos: EquationOfState, state: ThermoState):
    """p = theta**2.5 P(rho/theta**1.5) + (a/3) theta**4."""
    rho, theta = _rt(state)
    Z = rho * theta ** (-1.5)
    return theta ** 2.5 * eos.P(Z) + (eos.a / 3.0) * theta ** 4


def internal_energy(eos: EquationOfState, state: ThermoState):
    """e = 1.5 theta**2.5 / rho * P(Z) + a theta**4 / rho (specific energy)."""
    rho, theta = _rt(state)
    Z = rho * theta ** (-1.5)
    return 1.5 * theta ** 2.5 / rho * eos.P(Z) + eos.a * theta ** 4 / rho


def entropy(eos: EquationOfState, state: ThermoState):
    """s = S(Z) + (4a/3) theta**3 / rho (specific entropy).

    The additive constant of S is fixed per preset; relative-energy
    evaluations must therefore use a single eos instance for both the state
    and the reference.
    """
    rho, theta = _rt(state)
    Z = rho * theta ** (-1.5)
    return eos.S_structural(Z) + (4.0 * eos.a / 3.0) * theta ** 3 / rho


def thermo_partials(eos: EquationOfState, state: ThermoState):
    """(dp/drho, dp/dtheta, de/dtheta), checked for thermodynamic stability.

    Derivatives follow from the structural form by the chain rule; for the
    tabulated preset P' is the monotone interpolant's derivative.  Raises
    ThermodynamicStabilityError naming the inequality if dp/drho or de/dtheta
    fails to be positive anywhere in the state.
    """
    rho, theta = _rt(state)
    Z = rho * theta ** (-1.5)
    P = eos.P(Z)
    Pp = eos.P_prime(Z)
    dp_drho = theta * Pp
    dp_dtheta = 2.5 * theta ** 1.5 * P - 1.5 * rho * Pp + (4.0 * eos.a / 3.0) * theta ** 3
    de_dtheta = (3.75 * theta ** 1.5 * P - 2.25 * rho * Pp) / rho + 4.0 * eos.a * theta ** 3 / rho
    if not np.all(dp_drho > 0.0):
        raise ThermodynamicStabilityError(
            "dp/drho > 0", f"min value {float(np.min(dp_drho)):.3e}"
        )
    if not np.all(de_dtheta > 0.0):
        raise ThermodynamicStabilityError(
            "de/dtheta > 0", f"min value {float(np.min(de_dtheta)):.3e}"
        )
    return dp_drho, dp_dtheta, de_dtheta
