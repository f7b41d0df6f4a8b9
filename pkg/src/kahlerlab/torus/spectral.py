"""Trigonometric differentiation on the periodic unit cell of C^n.

Grid arrays have one axis per real coordinate, ordered ``x_1, y_1, ..., x_n, y_n``.
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np


class SpectralGrid:
    def __init__(self, n: int, size: int):
        if n < 1:
            raise ValueError("dimension must be at least 1")
        if size < 8 or size & (size - 1):
            raise ValueError("grid size must be a power of two and at least 8")
        self.n = n
        self.size = size
        self.shape = (size,) * (2 * n)

    @property
    def cell_area(self) -> float:
        return 1.0 / self.size ** (2 * self.n)

    @cached_property
    def points(self) -> np.ndarray:
        """Complex chart points, shape ``(*shape, n)``."""
        t = np.arange(self.size) / self.size
        axes = np.meshgrid(*([t] * (2 * self.n)), indexing="ij")
        return np.stack([axes[2 * j] + 1j * axes[2 * j + 1] for j in range(self.n)], axis=-1)

    def _freq(self, axis: int, nyquist: bool) -> np.ndarray:
        k = np.fft.fftfreq(self.size, d=1.0 / self.size)
        if not nyquist:
            k = np.where(np.abs(k) == self.size // 2, 0.0, k)
        shape = [1] * (2 * self.n)
        shape[axis] = self.size
        return k.reshape(shape)

    @cached_property
    def ddbar_symbols(self) -> np.ndarray:
        """``symbol[j, k]`` of ``d/dz_j d/dzbar_k`` on the Fourier grid."""
        n = self.n
        out = np.empty((n, n) + self.shape, complex)
        for j in range(n):
            for k in range(n):
                if j == k:
                    kx, ky = self._freq(2 * j, True), self._freq(2 * j + 1, True)
                    out[j, k] = -np.pi ** 2 * (kx ** 2 + ky ** 2)
                else:
                    # first-derivative factors lose the unpaired Nyquist mode
                    a = self._freq(2 * j, False) - 1j * self._freq(2 * j + 1, False)
                    b = self._freq(2 * k, False) + 1j * self._freq(2 * k + 1, False)
                    out[j, k] = -np.pi ** 2 * a * b
        return out

    def ddbar(self, f: np.ndarray) -> np.ndarray:
        """Complex Hessian ``H[..., j, k] = d_j dbar_k f`` of a real grid function."""
        # removing an offset keeps FFT round-off proportional to the oscillation of f;
        # a sample value (not the mean) makes constants map to exactly zero
        F = np.fft.fftn(f - f.flat[0])
        H = np.fft.ifftn(self.ddbar_symbols * F, axes=tuple(range(2, 2 + 2 * self.n)))
        return np.moveaxis(H, (0, 1), (-2, -1))

    def mean(self, f: np.ndarray) -> float:
        return float(np.mean(f))

    def integrate(self, f: np.ndarray) -> float:
        """Integral over the unit cell with respect to Lebesgue measure ``dx dy``.

        Correctly rounded sum, so a constant integrand integrates exactly.
        """
        f = np.asarray(f, dtype=float)
        return math.fsum(f.ravel()) / f.size
