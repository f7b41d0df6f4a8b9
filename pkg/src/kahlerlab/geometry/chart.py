"""Chart points and chart domains."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PointOutsideDomain

DEFAULT_MARGIN = 1e-6

DOMAIN_KINDS = ("plane", "ball", "polydisc", "torus")


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """Point of a coordinate chart, ``coords = (z_1, ..., z_n)``."""

    coords: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.coords, dtype=complex))
        if z.ndim != 1 or z.size < 1:
            raise ValueError("chart point needs a 1-d vector of n >= 1 coordinates")
        if not np.all(np.isfinite(z)):
            raise ValueError("chart coordinates must be finite")
        object.__setattr__(self, "coords", z)

    @property
    def n(self) -> int:
        return self.coords.size

    def __repr__(self):
        return f"ChartPoint({self.coords.tolist()!r})"


def as_point(p) -> ChartPoint:
    return p if isinstance(p, ChartPoint) else ChartPoint(p)


@dataclass(frozen=True)
class Domain:
    """Open chart domain with an explicit membership predicate.

    ``bounded`` selects which axes of a polydisc are constrained to the
    unit disc (``None`` means all of them), so ``C x disc`` is a polydisc
    with ``bounded=(False, True)``. A torus chart is the periodic unit
    cell; every finite point is admissible.
    """

    kind: str = "plane"
    bounded: tuple[bool, ...] | None = None

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    def contains(self, p, margin: float = DEFAULT_MARGIN) -> bool:
        z = as_point(p).coords
        if self.kind in ("plane", "torus"):
            return True
        if self.kind == "ball":
            return float(np.sum(np.abs(z) ** 2)) < (1.0 - margin) ** 2
        mask = np.ones(z.size, bool) if self.bounded is None else np.asarray(self.bounded, bool)
        if mask.size != z.size:
            raise ValueError("polydisc axis mask does not match the point dimension")
        return bool(np.all(np.abs(z[mask]) < 1.0 - margin))

    def require(self, p, margin: float = DEFAULT_MARGIN) -> ChartPoint:
        p = as_point(p)
        if not self.contains(p, margin):
            raise PointOutsideDomain(f"{p!r} is not inside the {self.kind} domain (margin {margin})")
        return p

    def sample(self, rng: np.random.Generator, n: int, size: int, fill: float = 0.9) -> np.ndarray:
        """Random interior points, shape ``(size, n)``; bounded axes stay within radius ``fill``."""
        z = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
        if self.kind == "ball":
            r = fill * rng.random(size) ** (1.0 / (2 * n))
            return z / np.linalg.norm(z, axis=1, keepdims=True) * r[:, None]
        if self.kind == "torus":
            return rng.random((size, n)) + 1j * rng.random((size, n))
        if self.kind == "plane":
            return 0.5 * z
        mask = np.ones(n, bool) if self.bounded is None else np.asarray(self.bounded, bool)
        disc = fill * np.sqrt(rng.random((size, n))) * np.exp(2j * np.pi * rng.random((size, n)))
        return np.where(mask, disc, 0.5 * z)
