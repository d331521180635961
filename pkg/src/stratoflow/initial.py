"""Initial-condition presets.

All presets produce smooth states that already satisfy the structural
invariants: vorticity vanishing on the wall layers, zero per-layer horizontal
mean, mean flow pinned at the walls.  Randomness flows from a single 64-bit
seed through a counter-based generator so runs reproduce across platforms.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .solver.grid import LayeredGrid
from .solver.spectral import irfft_layers
from .solver.stepping import LayeredState

__all__ = ["taylor_green", "random_bandlimited", "shear_layer", "build_initial"]


def taylor_green(grid: LayeredGrid, amplitude: float = 1.0) -> LayeredState:
    """Per-layer cellular vortex sin(pi x1) sin(pi x2), modulated by sin(pi x3)."""
    X1, X2 = grid.meshgrid_h()
    layer = np.sin(np.pi * X1) * np.sin(np.pi * X2)
    omega = amplitude * np.sin(np.pi * grid.x3)[:, None, None] * layer[None, :, :]
    omega[0] = 0.0
    omega[-1] = 0.0
    return LayeredState(t=0.0, omega=omega, u_mean=np.zeros((grid.n_layers, 2)))


def random_bandlimited(
    grid: LayeredGrid,
    seed: int,
    kmax: int = 4,
    amplitude: float = 1.0,
    n_vertical_modes: int = 3,
) -> LayeredState:
    """Seeded random vorticity with horizontal wavenumber indices <= kmax.

    Built as a sum over vertical sine modes of independent random horizontal
    fields, so the walls and the horizontal means are exactly zero and the
    field is smooth.  Identical seeds give identical fields.
    """
    if kmax < 1:
        raise DomainError("kmax must be at least 1")
    if kmax > grid.n1 // 3 or kmax > grid.n2 // 3:
        raise DomainError("kmax must stay inside the dealiased band (<= n/3)")
    rng = np.random.Generator(np.random.Philox(seed))
    nk1 = grid.n1 // 2 + 1
    m2 = np.abs(np.fft.fftfreq(grid.n2) * grid.n2)
    m1 = np.arange(nk1)
    keep = (np.add.outer(m2 * 0, m1) <= kmax) & (m2[:, None] <= kmax)
    keep[0, 0] = False  # zero horizontal mean per layer
    omega = np.zeros(grid.shape)
    jmax = min(n_vertical_modes, grid.n3 - 1)
    for j in range(1, jmax + 1):
        coeff = rng.standard_normal((grid.n2, nk1)) + 1j * rng.standard_normal((grid.n2, nk1))
        coeff *= keep
        layer_field = irfft_layers(grid, coeff[None, :, :])[0]
        omega += np.sin(j * np.pi * grid.x3)[:, None, None] * layer_field[None, :, :] / j
    sup = np.max(np.abs(omega))
    if sup > 0.0:
        omega *= amplitude / sup
    omega[0] = 0.0
    omega[-1] = 0.0
    return LayeredState(t=0.0, omega=omega, u_mean=np.zeros((grid.n_layers, 2)))


def shear_layer(grid: LayeredGrid, amplitude: float = 1.0) -> LayeredState:
    """Mean-flow-only state: omega = 0, Umean = amplitude sin(pi x3) e1."""
    u_mean = np.zeros((grid.n_layers, 2))
    u_mean[:, 0] = amplitude * np.sin(np.pi * grid.x3)
    return LayeredState(t=0.0, omega=np.zeros(grid.shape), u_mean=u_mean)


def build_initial(
    grid: LayeredGrid,
    preset: str,
    *,
    seed: int = 0,
    kmax: int = 4,
    amplitude: float = 1.0,
) -> LayeredState:
    """Construct a named preset; unknown names raise DomainError."""
    if preset == "taylor-green":
        return taylor_green(grid, amplitude=amplitude)
    if preset == "random-bandlimited":
        return random_bandlimited(grid, seed=seed, kmax=kmax, amplitude=amplitude)
    if preset == "shear-layer":
        return shear_layer(grid, amplitude=amplitude)
    raise DomainError(f"unknown initial-condition preset {preset!r}")
