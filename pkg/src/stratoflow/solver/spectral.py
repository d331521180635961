"""Per-layer spectral operators on the horizontal torus.

All operators act on stacks of layers at once: scalar fields are
(n_layers, n2, n1), 2-vector fields are (2, n_layers, n2, n1).
"""

from __future__ import annotations

import numpy as np

from .grid import LayeredGrid

__all__ = [
    "rfft_layers",
    "irfft_layers",
    "grad_h",
    "div_h",
    "curl_h",
    "biot_savart_layer",
]


def rfft_layers(grid: LayeredGrid, f: np.ndarray) -> np.ndarray:
    return np.fft.rfft2(f, axes=(-2, -1))


def irfft_layers(grid: LayeredGrid, fh: np.ndarray) -> np.ndarray:
    return np.fft.irfft2(fh, s=(grid.n2, grid.n1), axes=(-2, -1))


def grad_h(grid: LayeredGrid, f: np.ndarray) -> np.ndarray:
    """Horizontal gradient (d/dx1 f, d/dx2 f) by spectral differentiation."""
    fh = rfft_layers(grid, f)
    K1, K2 = grid.wavenumbers()
    d1 = irfft_layers(grid, 1j * K1 * fh)
    d2 = irfft_layers(grid, 1j * K2 * fh)
    return np.stack([d1, d2])


def div_h(grid: LayeredGrid, u: np.ndarray) -> np.ndarray:
    """Horizontal divergence of a 2-vector field."""
    u1h = rfft_layers(grid, u[0])
    u2h = rfft_layers(grid, u[1])
    K1, K2 = grid.wavenumbers()
    return irfft_layers(grid, 1j * K1 * u1h + 1j * K2 * u2h)


def curl_h(grid: LayeredGrid, u: np.ndarray) -> np.ndarray:
    """Scalar horizontal curl d/dx1 u2 - d/dx2 u1, layer by layer."""
    u1h = rfft_layers(grid, u[0])
    u2h = rfft_layers(grid, u[1])
    K1, K2 = grid.wavenumbers()
    return irfft_layers(grid, 1j * K1 * u2h - 1j * K2 * u1h)


def biot_savart_layer(grid: LayeredGrid, omega: np.ndarray) -> np.ndarray:
    """Recover the fluctuating velocity from the vorticity, layer by layer.

    Solves the horizontal Poisson problem for the streamfunction and returns
    its perpendicular gradient; the zero horizontal wavenumber is dropped, so
    the result has zero mean on every layer (the mean flow is evolved
    separately) and is divergence-free to round-off.
    """
    oh = rfft_layers(grid, omega)
    K1, K2 = grid.wavenumbers()
    k2 = K1 ** 2 + K2 ** 2
    inv = np.zeros_like(k2)
    nz = k2 > 0.0
    inv[nz] = -1.0 / k2[nz]
    psi_h = oh * inv  # streamfunction: laplacian psi = omega, zero-mode removed
    u1 = irfft_layers(grid, -1j * K2 * psi_h)
    u2 = irfft_layers(grid, 1j * K1 * psi_h)
    return np.stack([u1, u2])
