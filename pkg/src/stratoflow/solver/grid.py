"""Mixed grid: period-2 torus in the horizontal, bounded interval vertically.

Fields live on (n3+1, n2, n1) arrays in C order, so x1 is the fastest axis;
horizontal derivatives are spectral (real FFT over the last two axes),
vertical ones are finite differences on the n3+1 uniformly spaced nodes of
[0, 1] including both walls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

__all__ = ["LayeredGrid"]


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class LayeredGrid:
    """n1 x n2 horizontal nodes on [-1,1)^2, n3 vertical intervals on [0,1]."""

    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        if not (_is_pow2(self.n1) and _is_pow2(self.n2)):
            raise DomainError("n1 and n2 must be powers of two for the fast transforms")
        if self.n1 < 8 or self.n2 < 8:
            raise DomainError("horizontal resolutions below 8 are rejected")
        if self.n3 < 2:
            raise DomainError("need at least 2 vertical intervals")

    @property
    def h1(self) -> float:
        return 2.0 / self.n1

    @property
    def h2(self) -> float:
        return 2.0 / self.n2

    @property
    def h3(self) -> float:
        return 1.0 / self.n3

    @property
    def n_layers(self) -> int:
        return self.n3 + 1

    @property
    def shape(self) -> tuple[int, int, int]:
        """Scalar field shape (layers, x2, x1)."""
        return (self.n3 + 1, self.n2, self.n1)

    @property
    def x1(self) -> np.ndarray:
        return -1.0 + self.h1 * np.arange(self.n1)

    @property
    def x2(self) -> np.ndarray:
        return -1.0 + self.h2 * np.arange(self.n2)

    @property
    def x3(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n3 + 1)

    def meshgrid_h(self):
        """(X1, X2) broadcastable to one layer, indexed [x2, x1]."""
        return np.meshgrid(self.x1, self.x2, indexing="xy")

    # -- spectral bookkeeping (real FFT over axes (1, 2) = (x2, x1)) --

    @property
    def k1(self) -> np.ndarray:
        """Angular wavenumbers of the rfft axis (x1): pi * (0 .. n1/2)."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.n1, d=self.h1)

    @property
    def k2(self) -> np.ndarray:
        """Angular wavenumbers of the full-fft axis (x2)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n2, d=self.h2)

    def wavenumbers(self):
        """(K1, K2) shaped (n2, n1//2+1) matching the rfft2 layout."""
        return np.meshgrid(self.k1, self.k2, indexing="xy")

    def k_squared(self) -> np.ndarray:
        K1, K2 = self.wavenumbers()
        return K1 ** 2 + K2 ** 2

    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask on the rfft2 layout (True = keep)."""
        m1 = np.arange(self.n1 // 2 + 1)
        m2 = np.abs(np.fft.fftfreq(self.n2) * self.n2)
        keep1 = m1 <= self.n1 // 3
        keep2 = m2 <= self.n2 // 3
        return np.outer(keep2, keep1)

    # -- quadrature --

    def vertical_weights(self) -> np.ndarray:
        """Trapezoid weights over [0,1]: h3 * [1/2, 1, ..., 1, 1/2]."""
        w = np.full(self.n3 + 1, self.h3)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def cell_area(self) -> float:
        return self.h1 * self.h2

    def integrate(self, f: np.ndarray) -> float:
        """Volume integral: exact uniform sum horizontally, trapezoid vertically."""
        if f.shape != self.shape:
            raise DomainError(f"field shape {f.shape} does not match grid {self.shape}")
        layer_sums = f.sum(axis=(1, 2)) * self.cell_area()
        return float(np.dot(self.vertical_weights(), layer_sums))
