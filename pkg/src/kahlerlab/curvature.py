"""Chern curvature, Ricci form, scalar curvature and sectional functionals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMetric, ZeroVector
from .geometry.metric import MetricJet

TWO_PI = 2.0 * np.pi

# imaginary parts above this on hsc/hbc flag a non-Kahler or corrupted tensor
IMAG_RESIDUE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """Chern curvature at one point.

    ``coeffs[j, k, l, m]`` is the metric contraction ``R_{j kbar l mbar}``, so
    ``Theta(v, vbar) w . w = sum R v_j conj(v_k) w_l conj(w_m)``; ``endo[j, k, a, l]``
    holds the endomorphism coefficients (input ``a``, output ``l``).
    ``frame_gram`` is the metric matrix in the same coordinates.
    """

    coeffs: np.ndarray
    frame_gram: np.ndarray
    endo: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        g = np.asarray(self.frame_gram, dtype=complex)
        n = g.shape[0]
        if c.shape != (n, n, n, n):
            raise ValueError(f"coefficient shape {c.shape} does not match gram of size {n}")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "frame_gram", g)
        if self.endo is None:
            object.__setattr__(self, "endo", np.einsum("jkam,ml->jkal", c, _inverse(g)))

    @property
    def n(self) -> int:
        return self.frame_gram.shape[0]

    def is_unitary(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.frame_gram - np.eye(self.n))) <= tol)


@dataclass(frozen=True, eq=False)
class RicciData:
    """``ricci`` is rho with ``Ric = (i / 2 pi) sum rho_{jk} dz_j ^ dzbar_k``."""

    ricci: np.ndarray
    scalar: float

    @property
    def form(self) -> np.ndarray:
        """Coefficient matrix of the Ricci form against ``i dz ^ dzbar``."""
        return self.ricci / TWO_PI


def _inverse(g: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(g)) or np.linalg.cond(g) > 1e14:
        raise SingularMetric("metric matrix is singular or ill-conditioned")
    return np.linalg.inv(g)


def chern_curvature(jet: MetricJet) -> CurvatureTensor:
    """Chern curvature coefficients from order-2 metric jets.

    ``c_{jkal} = -sum_b W_{bl} d_j dbar_k g_{ab}
    + sum_{b,p,q} W_{pl} W_{bq} d_j g_{ab} dbar_k g_{qp}`` with ``W = g^-1``.
    """
    if jet.d2 is None:
        raise ValueError("chern_curvature needs jets of order 2")
    W = _inverse(jet.value)
    endo = (-np.einsum("bl,jkab->jkal", W, jet.d2)
            + np.einsum("pl,bq,jab,kqp->jkal", W, W, jet.d1, jet.d1bar, optimize=True))
    coeffs = np.einsum("jkal,lm->jkam", endo, jet.value)
    return CurvatureTensor(coeffs=coeffs, frame_gram=jet.value, endo=endo)


def kahler_symmetry_defect(tensor: CurvatureTensor) -> float:
    """Relative violation of the Kahler symmetries of the lowered coefficients.

    Checks ``R_{jklm} = R_{lkjm} = R_{jmlk} = R_{lmjk} = conj(R_{kjml})``,
    which hold in any coordinates, so no unitary frame is needed.
    """
    R = tensor.coeffs
    scale = max(1.0, float(np.max(np.abs(R))))
    d = max(
        np.max(np.abs(R - R.transpose(2, 1, 0, 3))),
        np.max(np.abs(R - R.transpose(0, 3, 2, 1))),
        np.max(np.abs(R - R.transpose(2, 3, 0, 1))),
        np.max(np.abs(R - np.conj(R.transpose(1, 0, 3, 2)))),
    )
    return float(d) / scale


def _vector(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != n:
        raise ValueError(f"vector of length {v.size} for dimension {n}")
    if not np.any(v):
        raise ZeroVector("direction vector is zero")
    return v


def norm2(gram: np.ndarray, v: np.ndarray) -> float:
    return float(np.real(v @ gram @ v.conj()))


def quartic(coeffs: np.ndarray, v, w) -> complex:
    """``sum R_{jklm} v_j conj(v_k) w_l conj(w_m)``."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return complex(np.einsum("jklm,j,k,l,m->", coeffs, v, v.conj(), w, w.conj()))


def hbc(tensor: CurvatureTensor, v, w, return_residue: bool = False):
    """Holomorphic bisectional curvature in the directions ``v, w``."""
    v = _vector(v, tensor.n)
    w = _vector(w, tensor.n)
    value = quartic(tensor.coeffs, v, w) / (norm2(tensor.frame_gram, v) * norm2(tensor.frame_gram, w))
    if return_residue:
        return value.real, value.imag
    return value.real


def hsc(tensor: CurvatureTensor, v, return_residue: bool = False):
    """Holomorphic sectional curvature; invariant under ``v -> c v``."""
    return hbc(tensor, v, v, return_residue=return_residue)


def hsc_batch(tensor: CurvatureTensor, V: np.ndarray) -> np.ndarray:
    """HSC for the rows of ``V`` (real parts)."""
    V = np.asarray(V, dtype=complex)
    num = np.einsum("jklm,sj,sk,sl,sm->s", tensor.coeffs, V, V.conj(), V, V.conj(), optimize=True)
    den = np.real(np.einsum("sl,lm,sm->s", V, tensor.frame_gram, V.conj())) ** 2
    if np.any(den <= 0):
        raise ZeroVector("batch contains a zero vector")
    return np.real(num) / den


def ricci_and_scalar(tensor: CurvatureTensor, jet: MetricJet | None = None) -> RicciData:
    """Ricci coefficients (endomorphism trace) and Chern scalar curvature.

    ``rho_{jk} = sum_a c_{jkaa}`` and ``scal = (1/2pi) tr_g rho``. The inverse
    metric is used explicitly, so no unitary frame is assumed.
    """
    gram = tensor.frame_gram if jet is None else jet.value
    if gram.shape != tensor.frame_gram.shape:
        raise ValueError("jet and tensor dimensions differ")
    W = _inverse(gram)
    rho = np.einsum("jkam,ma->jk", tensor.coeffs, W)
    scalar = np.einsum("kj,jk->", W, rho) / TWO_PI
    return RicciData(ricci=rho, scalar=float(np.real(scalar)))


def change_frame(tensor: CurvatureTensor, L: np.ndarray) -> CurvatureTensor:
    """Express the tensor in the basis ``e_a = sum_l L[l, a] d/dz_l``."""
    L = np.asarray(L, dtype=complex)
    Lc = L.conj()
    R = np.einsum("jklm,ja,kb,lc,md->abcd", tensor.coeffs, L, Lc, L, Lc, optimize=True)
    return CurvatureTensor(coeffs=R, frame_gram=L.T @ tensor.frame_gram @ Lc)


def unitary_frame(tensor: CurvatureTensor) -> CurvatureTensor:
    """Same tensor in a frame that is orthonormal for ``frame_gram``."""
    A = tensor.frame_gram.T
    L = np.linalg.inv(np.linalg.cholesky(A)).conj().T
    out = change_frame(tensor, L)
    return CurvatureTensor(coeffs=out.coeffs, frame_gram=np.eye(tensor.n))


def ricci_batch(jets: MetricJet) -> np.ndarray:
    """Ricci coefficients ``rho`` for a batch of jets (leading batch axis)."""
    W = np.linalg.inv(jets.value)
    first = -np.einsum("sba,sjkab->sjk", W, jets.d2)
    second = np.einsum("spa,sbq,sjab,skqp->sjk", W, W, jets.d1, jets.d1bar, optimize=True)
    return first + second


def _logdet_hessian(metric):
    from ._jax import jax, jnp

    def logdet(z, zb):
        return jnp.log(jnp.linalg.det(metric.coefficients(z, zb)))

    dz = jax.jacfwd(logdet, argnums=0, holomorphic=True)
    return jax.jit(jax.jacfwd(dz, argnums=1, holomorphic=True))


def ricci_logdet_check(metric, p, rtol: float = 1e-6):
    """Ricci coefficients by contraction against ``-d dbar log det g`` differentiated directly."""
    from .geometry.metric import evaluate_jet
    from .geometry.chart import as_point
    from .report import compare

    p = as_point(p)
    rho = ricci_and_scalar(chern_curvature(evaluate_jet(metric, p))).ricci
    cache = metric.__dict__.setdefault("_logdet_hessian", _logdet_hessian(metric))
    z = p.coords
    oracle = -np.asarray(cache(z, z.conj()))
    scale = max(float(np.max(np.abs(oracle))), 1e-12)
    err = float(np.max(np.abs(rho - oracle))) / scale
    return compare("ricci-logdet", err, 0.0, "<=", rtol,
                   witness={"metric": metric.name, "point": z}, ricci=rho)


def hsc_sign_check(model, metric, points, rng, samples: int = 200, tol: float = 1e-9):
    """Sampled HSC against the catalogue sign tag of ``model``."""
    from .geometry.metric import evaluate_jet
    from .report import compare
    from .tensors import sphere_samples

    lo, hi = np.inf, -np.inf
    zero_dir = np.inf
    for p in points:
        t = chern_curvature(evaluate_jet(metric, p))
        vals = hsc_batch(t, sphere_samples(rng, metric.n, samples))
        axes = hsc_batch(t, np.eye(metric.n, dtype=complex))
        lo, hi = min(lo, vals.min(), axes.min()), max(hi, vals.max(), axes.max())
        zero_dir = min(zero_dir, float(np.min(np.abs(axes))))
    tag = model.hsc_sign
    const = model.curvature_constant(**metric.params)
    witness = {"model": model.name, "points": np.asarray(points)}
    if tag == "zero":
        rep = compare("hsc-sign-catalog", max(abs(lo), abs(hi)), 0.0, "==", tol, witness=witness)
    elif tag in ("negative-constant", "positive-constant"):
        spread = max(abs(lo - const), abs(hi - const))
        rep = compare("hsc-sign-catalog", spread, 0.0, "==", tol * max(1.0, abs(const)),
                      witness=witness, constant=const)
        if (const < 0) != (tag == "negative-constant"):
            rep.status = "fail"
    elif tag.startswith("non-positive"):
        # needs a flat direction at every point
        rep = compare("hsc-sign-catalog", hi, 0.0, "<=", tol, witness=witness,
                      flat_direction=zero_dir)
        if zero_dir > tol:
            rep.status = "fail"
    else:
        rep = compare("hsc-sign-catalog", 0.0, 0.0, "==", 0.0, witness=witness,
                      note="indefinite model: range recorded only")
    rep.details.update(tag=tag, min_hsc=float(lo), max_hsc=float(hi))
    return rep
