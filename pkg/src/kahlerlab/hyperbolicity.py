"""Genus-degree arithmetic for curves, the disc distance, and subharmonicity along disc maps."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .curvature import TWO_PI
from .errors import PointOutsideDomain
from .geometry.metric import MetricField, evaluate_jet
from .report import FAIL, PASS, VerificationReport, combine, compare

CONSISTENT = "consistent"
OBSTRUCTED = "obstructed"


@dataclass(frozen=True)
class CurveData:
    genus: int
    degree: float
    multiplicities: tuple[int, ...] = ()

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if not self.degree > 0:
            raise ValueError("degree must be positive")
        if any(m < 2 for m in self.multiplicities):
            raise ValueError("multiplicities count non-immersed points and must be >= 2")
        object.__setattr__(self, "multiplicities", tuple(int(m) for m in self.multiplicities))


def demailly_bound(curve: CurveData, kappa: float) -> VerificationReport:
    """``2g - 2 >= (kappa/2pi) deg C + sum (m_p - 1)``.

    The report passes when the inequality holds (``consistent``); a failure
    means no metric with HSC <= -kappa can exist around this curve.
    """
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    lhs = 2 * curve.genus - 2
    rhs = kappa / TWO_PI * curve.degree + sum(m - 1 for m in curve.multiplicities)
    rep = compare("demailly-criterion", lhs, rhs, ">=", 0.0,
                  witness={"genus": curve.genus, "degree": curve.degree,
                           "multiplicities": list(curve.multiplicities), "kappa": kappa})
    rep.details["verdict"] = CONSISTENT if rep.passed else OBSTRUCTED
    return rep


def pluecker_genus(d: int) -> int:
    """Genus of a smooth plane curve of degree ``d``."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    return (d - 1) * (d - 2) // 2


def hurwitz_tangent_degree(g: int) -> int:
    """Degree of the tangent bundle of a compact curve of genus ``g``."""
    if g < 0:
        raise ValueError("genus must be non-negative")
    return 2 - 2 * g


@dataclass(frozen=True)
class SurfaceExampleParams:
    g: int
    a: int
    b: int
    d: int


def validate_surface_example(params: SurfaceExampleParams) -> VerificationReport:
    """Check every constraint of the singular-fibre construction and the fibre genera.

    The special fibre of genus ``g`` with a cusp-like point of multiplicity
    ``a`` must be obstructed at ``kappa = 0`` (hence for every ``kappa >= 0``).
    """
    g, a, b, d = params.g, params.a, params.b, params.d
    w = {"g": g, "a": a, "b": b, "d": d}

    def flag(name, ok, **extra):
        return VerificationReport("surface-example", PASS if ok else FAIL, relation="==",
                                  witness=dict(w, constraint=name), details=dict(extra, constraint=name))

    smooth = pluecker_genus(d) if d >= 1 else -1
    nodal = smooth - 1
    checks = [
        flag("g >= 2", g >= 2),
        flag("0 < a < b", 0 < a < b),
        flag("gcd(a, b) = 1", a > 0 and b > 0 and gcd(a, b) == 1),
        flag("a >= 2g", a >= 2 * g),
        flag("d >= 4", d >= 4),
        flag("smooth fibre genus >= 2", smooth >= 2, genus=smooth),
        flag("one-node fibre genus >= 2", nodal >= 2, genus=nodal),
    ]
    special = None
    if g >= 0 and a >= 2:
        special = demailly_bound(CurveData(g, 1.0, (a,)), 0.0)
        checks.append(flag("special fibre obstructed", special.details["verdict"] == OBSTRUCTED,
                           lhs=special.lhs, rhs=special.rhs))
    else:
        checks.append(flag("special fibre obstructed", False))
    out = combine("surface-example", checks, witness=w)
    out.details.update(
        fibre_genera={"smooth": smooth, "special": g, "one-node": nodal},
        constraints={c.details["constraint"]: c.status for c in checks})
    return out


# ------------------------------------------------------------------ disc geometry

def poincare_distance(z: complex, w: complex) -> float:
    """Distance of the disc metric ``|dz|^2 / (1 - |z|^2)^2``: ``artanh |z - w| / |1 - conj(w) z|``."""
    z, w = complex(z), complex(w)
    if abs(z) >= 1 or abs(w) >= 1:
        raise PointOutsideDomain("points must lie in the open unit disc")
    return float(np.arctanh(abs(z - w) / abs(1 - w.conjugate() * z)))


def mobius(a: complex, theta: float = 0.0):
    """Disc automorphism ``t -> e^{i theta} (t - a) / (1 - conj(a) t)``."""
    a = complex(a)
    if abs(a) >= 1:
        raise PointOutsideDomain("Mobius centre must lie in the disc")
    rot = np.exp(1j * theta)
    return lambda t: rot * (t - a) / (1 - a.conjugate() * t)


@dataclass(frozen=True, eq=False)
class DiscMap:
    """Polynomial map ``t -> sum_k coeffs[k] t^k`` into C^n."""

    coeffs: np.ndarray
    radius: float = float("inf")
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None]
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    def derivatives(self, t: complex, order: int = 2) -> list[np.ndarray]:
        """``[f(t), f'(t), ..., f^(order)(t)]``."""
        if abs(t) >= self.radius:
            raise PointOutsideDomain("t lies outside the convergence disc")
        c = self.coeffs
        out = []
        for _ in range(order + 1):
            k = np.arange(c.shape[0])
            out.append(np.sum(c * (complex(t) ** k)[:, None], axis=0))
            c = (c * k[:, None])[1:] if c.shape[0] > 1 else np.zeros_like(c[:1])
        return out


def subharmonicity_defect(metric: MetricField, f: DiscMap, t: complex, kappa: float,
                          eps_reg: float = 0.0, rtol: float = 1e-9) -> VerificationReport:
    """``d dbar psi`` for ``psi = log(|f'|^2_omega + eps)`` against its lower bound.

    ``(kappa N^3 + eps (|phi'|^2 + kappa N^2)) / (N + eps)^2`` with
    ``N = |f'|^2`` and ``phi' = f'' + Gamma(f', f')``; ``kappa`` must come from
    an independent oracle. Exact chain rule on metric jets, no differencing.
    """
    if eps_reg < 0 or kappa < 0:
        raise ValueError("eps_reg and kappa must be non-negative")
    if f.n != metric.n:
        raise ValueError("map and metric dimensions differ")
    z, d1f, d2f = f.derivatives(t, 2)
    if eps_reg == 0 and not np.any(d1f):
        raise ValueError("f'(t) = 0 requires eps_reg > 0")
    jet = evaluate_jet(metric, z)
    g, dg, dbg, ddg = jet.value, jet.d1, jet.d1bar, jet.d2
    c1, c2 = d1f.conj(), d2f.conj()
    N = float(np.real(d1f @ g @ c1))
    dg_t = np.einsum("jlm,j->lm", dg, d1f)         # d/dt of g(f(t))
    dbg_t = np.einsum("klm,k->lm", dbg, c1)        # d/dtbar of g(f(t))
    ddg_t = np.einsum("jklm,j,k->lm", ddg, d1f, c1)
    dN = d2f @ g @ c1 + d1f @ dg_t @ c1
    ddN = (d2f @ g @ c2 + d2f @ dbg_t @ c1 + d1f @ dg_t @ c2 + d1f @ ddg_t @ c1).real
    D = N + eps_reg
    lhs = float(ddN / D - abs(dN) ** 2 / D ** 2)
    W = np.linalg.inv(g)
    gamma = np.einsum("jam,ml->jal", dg, W)
    phi = d2f + np.einsum("jal,j,a->l", gamma, d1f, d1f)
    phi2 = float(np.real(phi @ g @ phi.conj()))
    rhs = (kappa * N ** 3 + eps_reg * (phi2 + kappa * N * N)) / D ** 2
    # cancellation happens between the two parts of lhs, so scale by the larger one
    scale = max(abs(rhs), abs(ddN / D), 1e-300)
    rep = compare("subharmonicity", lhs, rhs, ">=", rtol * scale,
                  witness={"metric": metric.name, "t": complex(t), "eps_reg": eps_reg,
                           "kappa": kappa, "coeffs": f.coeffs},
                  norm2_fprime=N, phi_norm2=phi2,
                  equality_defect=abs(lhs - rhs) / max(abs(rhs), 1e-300),
                  nonnegative=bool(lhs >= -rtol * scale))
    return rep
