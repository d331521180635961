"""Transport coefficients (shear/bulk viscosity, heat conductivity) and the
constitutive fluxes built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError

__all__ = ["TransportCoefficients", "stress_tensor", "heat_flux"]


@dataclass(frozen=True)
class TransportCoefficients:
    """Temperature laws mu, lambda_bulk, kappa with their admissibility bounds.

    The bounds (checked by :meth:`validate_bounds` on a sampled grid) are
        mu_low (1 + theta) <= mu(theta),  |mu'(theta)| <= mu_prime_up,
        0 <= lambda_bulk(theta) <= lambda_up (1 + theta),
        kappa_low (1 + theta**beta) <= kappa(theta) <= kappa_up (1 + theta**beta),
    with growth exponent beta > 6.
    """

    mu: Callable[[np.ndarray], np.ndarray]
    lambda_bulk: Callable[[np.ndarray], np.ndarray]
    kappa: Callable[[np.ndarray], np.ndarray]
    beta: float
    mu_low: float
    mu_prime_up: float
    lambda_up: float
    kappa_low: float
    kappa_up: float

    def __post_init__(self):
        if self.beta <= 6.0:
            raise DomainError(f"conductivity growth exponent must exceed 6, got {self.beta}")
        if self.mu_low <= 0.0 or self.kappa_low <= 0.0:
            raise DomainError("lower transport bounds must be positive")

    @classmethod
    def linear(cls, mu0: float = 1.0, lam0: float = 0.0, kappa0: float = 1.0, beta: float = 7.0):
        """Affine-in-theta laws: mu = mu0(1+theta), lambda = lam0(1+theta),
        kappa = kappa0(1+theta**beta).  Satisfy the bounds by construction."""
        return cls(
            mu=lambda th: mu0 * (1.0 + np.asarray(th, dtype=float)),
            lambda_bulk=lambda th: lam0 * (1.0 + np.asarray(th, dtype=float)),
            kappa=lambda th: kappa0 * (1.0 + np.asarray(th, dtype=float) ** beta),
            beta=beta,
            mu_low=mu0,
            mu_prime_up=mu0,
            lambda_up=max(lam0, 1e-300),
            kappa_low=kappa0,
            kappa_up=kappa0,
        )

    def validate_bounds(self, theta_grid) -> dict:
        """Check the admissibility bounds on a sampled theta grid.

        Returns {check name: bool}; mu' is probed by centered differences.
        """
        th = np.asarray(theta_grid, dtype=float)
        if not np.all(th > 0.0):
            raise DomainError("theta grid must be positive")
        mu = self.mu(th)
        lam = self.lambda_bulk(th)
        kap = self.kappa(th)
        dth = 1e-6 * np.maximum(th, 1.0)
        mu_p = (self.mu(th + dth) - self.mu(th - dth)) / (2.0 * dth)
        tol = 1e-12
        return {
            "mu_lower": bool(np.all(self.mu_low * (1.0 + th) <= mu * (1.0 + tol))),
            "mu_prime": bool(np.all(np.abs(mu_p) <= self.mu_prime_up * (1.0 + 1e-6))),
            "lambda_range": bool(
                np.all(lam >= -tol) and np.all(lam <= self.lambda_up * (1.0 + th) * (1.0 + tol))
            ),
            "kappa_range": bool(
                np.all(self.kappa_low * (1.0 + th ** self.beta) <= kap * (1.0 + tol))
                and np.all(kap <= self.kappa_up * (1.0 + th ** self.beta) * (1.0 + tol))
            ),
        }


def stress_tensor(tc: TransportCoefficients, theta: float, grad_u) -> np.ndarray:
    """Newtonian viscous stress mu(theta)(grad u + grad u^T - 2/3 div u I) + lambda div u I.

    Symmetric by construction; its trace is 3 lambda(theta) div u.
    """
    if theta <= 0.0:
        raise DomainError("theta must be positive")
    g = np.asarray(grad_u, dtype=float)
    if g.shape != (3, 3):
        raise DomainError(f"grad_u must be 3x3, got {g.shape}")
    div_u = np.trace(g)
    mu = float(tc.mu(theta))
    lam = float(tc.lambda_bulk(theta))
    return mu * (g + g.T - (2.0 / 3.0) * div_u * np.eye(3)) + lam * div_u * np.eye(3)


def heat_flux(tc: TransportCoefficients, theta: float, grad_theta) -> np.ndarray:
    """Fourier's law: q = -kappa(theta) grad theta."""
    if theta <= 0.0:
        raise DomainError("theta must be positive")
    g = np.asarray(grad_theta, dtype=float)
    return -float(tc.kappa(theta)) * g
