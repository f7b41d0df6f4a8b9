"""Catalogue of closed-form model metrics used as fixtures and CLI choices.

Curvature constants follow the normalisation used everywhere in the package:
``hsc = -(d dbar log h) / h`` for a metric ``h |dz|^2`` on a curve, so the
disc metric ``(1 - |z|^2)^-2`` has holomorphic sectional curvature ``-2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .._jax import jnp
from .chart import Domain
from .metric import COEFFICIENT, POTENTIAL, MetricField

MODEL_NAMES = ("flat", "poincare-disc", "fubini-study-chart", "complex-ball", "product",
               "perturbed-torus")


@dataclass(frozen=True)
class ModelMetric:
    name: str
    defaults: dict
    param_ranges: dict
    hsc_sign: str
    description: str
    builder: Callable[..., MetricField] = field(repr=False)
    hsc_constant: Callable[..., float | None] = field(repr=False, default=lambda **kw: None)

    def build(self, **params) -> MetricField:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ValueError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        merged = dict(self.defaults, **params)
        for key, (lo, hi) in self.param_ranges.items():
            value = merged[key]
            if not lo <= value <= hi:
                raise ValueError(f"{self.name}: {key}={value} outside [{lo}, {hi}]")
        metric = self.builder(**merged)
        metric.name = self.name
        metric.params = merged
        return metric

    def curvature_constant(self, **params) -> float | None:
        """Closed-form constant HSC of the model, when it has one."""
        return self.hsc_constant(**dict(self.defaults, **params))


def flat(n: int = 1, scale: float = 1.0) -> MetricField:
    eye = jnp.eye(n, dtype=complex)
    return MetricField(n, lambda z, zb: scale * eye + 0.0 * z[0], Domain("plane"), COEFFICIENT)


def poincare_disc(scale: float = 1.0) -> MetricField:
    def coeff(z, zb):
        return jnp.reshape(scale / (1.0 - z[0] * zb[0]) ** 2, (1, 1))

    return MetricField(1, coeff, Domain("polydisc"), COEFFICIENT)


def fubini_study_chart(n: int = 1, scale: float = 1.0) -> MetricField:
    return MetricField(n, lambda z, zb: scale * jnp.log(1.0 + jnp.sum(z * zb)), Domain("plane"),
                       POTENTIAL)


def complex_ball(n: int = 2, scale: float = 1.0) -> MetricField:
    return MetricField(n, lambda z, zb: -scale * jnp.log(1.0 - jnp.sum(z * zb)), Domain("ball"),
                       POTENTIAL)


def product(flat_scale: float = 1.0, disc_scale: float = 1.0) -> MetricField:
    """``C x disc``: a flat factor times the disc metric (torus factor seen in its chart)."""

    def coeff(z, zb):
        h = disc_scale / (1.0 - z[1] * zb[1]) ** 2
        zero = 0.0 * z[0]
        return jnp.array([[flat_scale + zero, zero], [zero, h]])

    return MetricField(2, coeff, Domain("polydisc", bounded=(False, True)), COEFFICIENT)


def perturbed_torus(n: int = 1, amplitude: float = 0.1, coupling: float = 0.0) -> MetricField:
    """Periodic potential ``|z|^2 - a sum cos(2 pi x_l)/pi^2 - b cos(2 pi sum x_l)/(2 pi^2)``.

    Its metric is ``1 + a cos(2 pi x)`` per axis plus a rank-one coupling
    ``(b/2) cos(2 pi sum x)`` between axes.
    """

    def phi(z, zb):
        x2 = z + zb  # = 2 Re z
        val = jnp.sum(z * zb) - amplitude * jnp.sum(jnp.cos(jnp.pi * x2)) / jnp.pi ** 2
        if n > 1 and coupling:
            val = val - coupling * jnp.cos(jnp.pi * jnp.sum(x2)) / (2 * jnp.pi ** 2)
        return val

    return MetricField(n, phi, Domain("torus"), POTENTIAL)


_CATALOG = {
    "flat": ModelMetric(
        "flat", {"n": 1, "scale": 1.0}, {"n": (1, 8), "scale": (1e-6, 1e6)}, "zero",
        "Euclidean metric scale*I on C^n", flat, lambda **kw: 0.0),
    "poincare-disc": ModelMetric(
        "poincare-disc", {"scale": 1.0}, {"scale": (1e-6, 1e6)}, "negative-constant",
        "scale*(1-|z|^2)^-2 on the unit disc", poincare_disc,
        lambda scale, **kw: -2.0 / scale),
    "fubini-study-chart": ModelMetric(
        "fubini-study-chart", {"n": 1, "scale": 1.0}, {"n": (1, 8), "scale": (1e-6, 1e6)},
        "positive-constant", "potential scale*log(1+|z|^2) on an affine chart",
        fubini_study_chart, lambda scale, **kw: 2.0 / scale),
    "complex-ball": ModelMetric(
        "complex-ball", {"n": 2, "scale": 1.0}, {"n": (1, 8), "scale": (1e-6, 1e6)},
        "negative-constant", "potential -scale*log(1-|z|^2) on the unit ball", complex_ball,
        lambda scale, **kw: -2.0 / scale),
    "product": ModelMetric(
        "product", {"flat_scale": 1.0, "disc_scale": 1.0},
        {"flat_scale": (1e-6, 1e6), "disc_scale": (1e-6, 1e6)},
        "non-positive, not quasi-negative",
        "flat factor x disc metric on C x disc (flat directions everywhere)", product),
    "perturbed-torus": ModelMetric(
        "perturbed-torus", {"n": 1, "amplitude": 0.1, "coupling": 0.0},
        {"n": (1, 2), "amplitude": (0.0, 0.45), "coupling": (-0.4, 0.4)}, "indefinite",
        "periodic perturbation of the flat torus metric", perturbed_torus),
}


def model_catalog() -> list[ModelMetric]:
    return [_CATALOG[name] for name in MODEL_NAMES]


def get_model(name: str) -> ModelMetric:
    try:
        return _CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}") from None


def build_model(name: str, **params) -> MetricField:
    return get_model(name).build(**params)


def random_points(metric: MetricField, rng: np.random.Generator, size: int, fill: float = 0.8):
    return metric.domain.sample(rng, metric.n, size, fill=fill)
