"""Per-step scalar diagnostics of a layered state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import LayeredGrid
from .spectral import div_h, grad_h
from .stepping import LayeredState, total_velocity

__all__ = ["DiagnosticsRecord", "diagnostics", "CSV_HEADER"]

CSV_HEADER = "t,energy,enstrophy,max_vorticity,div_residual,max_velocity"


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy: float
    enstrophy: float
    max_vorticity: float
    div_residual: float
    max_velocity: float

    def csv_row(self) -> str:
        return ",".join(
            format(v, ".17g")
            for v in (
                self.t,
                self.energy,
                self.enstrophy,
                self.max_vorticity,
                self.div_residual,
                self.max_velocity,
            )
        )


def diagnostics(grid: LayeredGrid, state: LayeredState, r_profile) -> DiagnosticsRecord:
    """Kinetic energy sum(r/2 |U|^2) dV, enstrophy, sup norms, divergence residual.

    The volume element is the exact uniform horizontal sum times the vertical
    trapezoid rule, matching the solver's vertical accuracy.
    """
    r = np.asarray(r_profile, dtype=float)
    u = total_velocity(grid, state)
    sq = u[0] ** 2 + u[1] ** 2
    energy = grid.integrate(0.5 * r[:, None, None] * sq)
    enstrophy = grid.integrate(state.omega ** 2)
    div = div_h(grid, u)
    return DiagnosticsRecord(
        t=state.t,
        energy=energy,
        enstrophy=enstrophy,
        max_vorticity=float(np.max(np.abs(state.omega))),
        div_residual=float(np.max(np.abs(div))),
        max_velocity=float(np.sqrt(np.max(sq))),
    )


def velocity_gradient_sup(grid: LayeredGrid, state: LayeredState) -> float:
    """sup |grad_h U| used to normalize divergence residuals and for the
    exponential stability envelope."""
    u = total_velocity(grid, state)
    g1 = grad_h(grid, u[0])
    g2 = grad_h(grid, u[1])
    return float(np.max(np.sqrt(g1[0] ** 2 + g1[1] ** 2 + g2[0] ** 2 + g2[1] ** 2)))
