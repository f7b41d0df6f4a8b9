"""Hermitian metrics on a chart and their Wirtinger jets.

A metric is described by a function of ``(z, zb)`` where ``zb`` stands for
the conjugate coordinates but is treated as an independent complex
variable. Holomorphic forward-mode differentiation in ``z`` and ``zb``
then gives exact Wirtinger derivatives.

Index layout of :class:`MetricJet` (``g[l, m]`` is the coefficient of
``i dz_l ^ dzbar_m``)::

    value[l, m]       = g_{l mbar}
    d1[j, l, m]       = d g_{l mbar} / d z_j
    d1bar[k, l, m]    = d g_{l mbar} / d zbar_k
    d2[j, k, l, m]    = d^2 g_{l mbar} / d z_j d zbar_k
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .._jax import jax, jnp
from ..errors import NotPositiveDefinite, UnsupportedOrder
from ..report import compare
from .chart import DEFAULT_MARGIN, ChartPoint, Domain, as_point

COEFFICIENT = "coefficient"
POTENTIAL = "potential"

MAX_ORDER = 2


@dataclass(frozen=True, eq=False)
class MetricJet:
    value: np.ndarray
    d1: np.ndarray | None = None
    d1bar: np.ndarray | None = None
    d2: np.ndarray | None = None
    order: int = 2

    @property
    def n(self) -> int:
        return self.value.shape[0]

    def hermitian_defect(self) -> float:
        """Largest violation of ``g_{lm} = conj(g_{ml})`` over all stored orders."""
        defects = [np.max(np.abs(self.value - self.value.conj().T))]
        if self.d1 is not None:
            defects.append(np.max(np.abs(self.d1bar - np.conj(np.swapaxes(self.d1, 1, 2)))))
        if self.d2 is not None:
            # conj(d_j dbar_k g_{ml}) = d_k dbar_j g_{lm}
            defects.append(np.max(np.abs(self.d2 - np.conj(self.d2.transpose(1, 0, 3, 2)))))
        return float(max(defects))


def _jet_function(coeff: Callable) -> Callable:
    dz = jax.jacfwd(coeff, argnums=0, holomorphic=True)
    dzb = jax.jacfwd(coeff, argnums=1, holomorphic=True)
    dzdzb = jax.jacfwd(dz, argnums=1, holomorphic=True)

    def jet(z, zb):
        return coeff(z, zb), dz(z, zb), dzb(z, zb), dzdzb(z, zb)

    return jet


def _potential_coefficients(phi: Callable) -> Callable:
    return jax.jacfwd(jax.jacfwd(phi, argnums=0, holomorphic=True), argnums=1, holomorphic=True)


@dataclass(eq=False)
class MetricField:
    """Hermitian metric on a chart domain.

    ``function`` is either the coefficient map ``(z, zb) -> (n, n)`` or,
    for ``provenance="potential"``, a Kahler potential ``(z, zb) -> scalar``.
    Both must be written with ``jax.numpy`` so they can be differentiated.
    """

    n: int
    function: Callable
    domain: Domain = field(default_factory=Domain)
    provenance: str = COEFFICIENT
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in (COEFFICIENT, POTENTIAL):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        coeff = self.function if self.provenance == COEFFICIENT else _potential_coefficients(self.function)
        self._coeff = coeff
        self._jet = jax.jit(_jet_function(coeff))
        self._value = jax.jit(coeff)
        self._value_batch = jax.jit(jax.vmap(coeff))
        self._jet_batch = jax.jit(jax.vmap(_jet_function(coeff)))

    @property
    def coefficients(self) -> Callable:
        """The jax-traceable coefficient map ``(z, zb) -> g``."""
        return self._coeff

    def value(self, p) -> np.ndarray:
        z = as_point(p).coords
        return np.asarray(self._value(jnp.asarray(z), jnp.asarray(z.conj())))

    def values(self, points: np.ndarray) -> np.ndarray:
        """Metric matrices at a batch of points, shape ``(m, n, n)``."""
        z = np.asarray(points, dtype=complex).reshape(-1, self.n)
        return np.asarray(self._value_batch(jnp.asarray(z), jnp.asarray(z.conj())))

    def jets(self, points: np.ndarray) -> MetricJet:
        """Order-2 jets at a batch of points (leading batch axis on every block)."""
        z = np.asarray(points, dtype=complex).reshape(-1, self.n)
        v, a, b, c = self._jet_batch(jnp.asarray(z), jnp.asarray(z.conj()))
        return MetricJet(value=np.asarray(v), d1=np.moveaxis(np.asarray(a), -1, 1),
                         d1bar=np.moveaxis(np.asarray(b), -1, 1),
                         d2=np.asarray(c).transpose(0, 3, 4, 1, 2))

    def scaled(self, factor: float) -> "MetricField":
        coeff = self._coeff
        return MetricField(self.n, lambda z, zb: factor * coeff(z, zb), self.domain, COEFFICIENT,
                           name=f"{factor:g}*{self.name}", params=dict(self.params, factor=factor))


def evaluate_jet(metric: MetricField, p, order: int = 2, margin: float = DEFAULT_MARGIN,
                 check_positive: bool = True) -> MetricJet:
    """Exact jets of ``metric`` at ``p`` up to ``order`` mixed derivatives.

    Raises PointOutsideDomain, UnsupportedOrder or NotPositiveDefinite.
    """
    if not 0 <= order <= MAX_ORDER:
        raise UnsupportedOrder(f"jets of order {order} are not available (max {MAX_ORDER})")
    p = metric.domain.require(as_point(p), margin)
    if p.n != metric.n:
        raise ValueError(f"point has {p.n} coordinates, metric dimension is {metric.n}")
    z = jnp.asarray(p.coords)
    if order == 0:
        jet = MetricJet(value=np.asarray(metric._value(z, jnp.conj(z))), order=0)
    else:
        v, a, b, c = metric._jet(z, jnp.conj(z))
        d1 = np.moveaxis(np.asarray(a), -1, 0)
        d1bar = np.moveaxis(np.asarray(b), -1, 0)
        d2 = np.asarray(c).transpose(2, 3, 0, 1) if order >= 2 else None
        jet = MetricJet(value=np.asarray(v), d1=d1, d1bar=d1bar, d2=d2, order=order)
    if check_positive:
        require_positive(jet.value, where=p)
    return jet


def require_positive(g: np.ndarray, where=None) -> None:
    h = 0.5 * (g + g.conj().T)
    if not np.all(np.isfinite(h)):
        raise NotPositiveDefinite(f"metric is not finite at {where!r}")
    if np.linalg.eigvalsh(h)[0] <= 0.0:
        raise NotPositiveDefinite(f"metric is not positive definite at {where!r}")


def kahler_defect(jet: MetricJet) -> tuple[float, tuple[int, int, int]]:
    """``max |d_j g_{l mbar} - d_l g_{j mbar}|`` and the maximising ``(j, l, m)``."""
    d = np.abs(jet.d1 - jet.d1.transpose(1, 0, 2))
    idx = np.unravel_index(int(np.argmax(d)), d.shape)
    return float(d[idx]), tuple(int(i) for i in idx)


def check_kahler(metric: MetricField, p, tol: float = 1e-9):
    """Closedness of the Kahler form, tested as symmetry of first derivatives."""
    p = as_point(p)
    jet = evaluate_jet(metric, p, order=1)
    defect, idx = kahler_defect(jet)
    return compare("kahler-closedness", defect, 0.0, "==", tol,
                   witness={"metric": metric.name, "point": p.coords, "indices": idx},
                   max_defect=defect, indices=idx)


def transform_jet(jet: MetricJet, L: np.ndarray, Q: np.ndarray | None = None) -> MetricJet:
    """Jets at ``w = 0`` of the metric pulled back by ``z = z0 + L (w + q(w))``.

    ``q_b(w) = 1/2 sum_{a,j} Q[b, a, j] w_a w_j`` with ``Q`` symmetric in its
    last two indices. Only jets of the original metric at ``z0`` are needed.
    """
    n = jet.n
    L = np.asarray(L, dtype=complex)
    Q = np.zeros((n, n, n), complex) if Q is None else np.asarray(Q, dtype=complex)
    Lc = L.conj()
    # dJ[j, l, a] = d J_{la} / d w_j  with  J = L (I + Dq)
    dJ = np.einsum("lb,baj->jla", L, Q)
    dJc = dJ.conj()
    g, d1, d1b, d2 = jet.value, jet.d1, jet.d1bar, jet.d2
    value = L.T @ g @ Lc
    # derivative of g along the new coordinates
    d1w = np.einsum("clm,cj->jlm", d1, L)
    d1bw = np.einsum("dlm,dk->klm", d1b, Lc)
    new_d1 = (np.einsum("jla,lm,mb->jab", dJ, g, Lc)
              + np.einsum("la,jlm,mb->jab", L, d1w, Lc))
    new_d1b = (np.einsum("la,lm,kmb->kab", L, g, dJc)
               + np.einsum("la,klm,mb->kab", L, d1bw, Lc))
    new_d2 = None
    if d2 is not None:
        d2w = np.einsum("cdlm,cj,dk->jklm", d2, L, Lc)
        new_d2 = (np.einsum("jla,lm,kmb->jkab", dJ, g, dJc)
                  + np.einsum("jla,klm,mb->jkab", dJ, d1bw, Lc)
                  + np.einsum("la,jlm,kmb->jkab", L, d1w, dJc)
                  + np.einsum("la,jklm,mb->jkab", L, d2w, Lc))
    return MetricJet(value=value, d1=new_d1, d1bar=new_d1b, d2=new_d2, order=jet.order)


def normal_coordinates(jet: MetricJet, prime: MetricJet | None = None):
    """Linear map ``L`` and quadratic part ``Q`` giving holomorphic normal coordinates.

    In the new coordinates the metric equals the identity with vanishing
    first derivatives at the point. When ``prime`` is given, ``L`` also
    diagonalises it; the returned eigenvalues are its diagonal entries.
    Requires a Kahler ``jet``.
    """
    from scipy.linalg import eigh

    # the hermitian form v -> v^T g conj(v) has matrix conj(g) = g^T
    A = jet.value.T
    if prime is None:
        lam = np.ones(jet.n)
        V = np.linalg.inv(np.linalg.cholesky(A)).conj().T
    else:
        lam, V = eigh(prime.value.T, A)
    lin = transform_jet(jet, V)
    # Q[b, a, j] = - d_j g~_{a bbar}
    Q = -np.transpose(lin.d1, (2, 1, 0))
    Q = 0.5 * (Q + Q.transpose(0, 2, 1))
    return V, Q, np.asarray(lam, dtype=float)


def finite_difference_jet(metric: MetricField, p, h: float = 1e-4) -> MetricJet:
    """Order-2 jets by central differences in the real coordinates (an independent oracle)."""
    z = as_point(p).coords
    n = metric.n
    m = 2 * n
    E = np.zeros((m, n), complex)
    E[np.arange(n), np.arange(n)] = 1.0
    E[n + np.arange(n), np.arange(n)] = 1j
    pts = [z]
    for a in range(m):
        pts += [z + h * E[a], z - h * E[a]]
    for a in range(m):
        for b in range(a + 1, m):
            pts += [z + h * (s * E[a] + t * E[b]) for s in (1, -1) for t in (1, -1)]
    G = metric.values(np.array(pts))
    g0 = G[0]
    D1 = np.empty((m, n, n), complex)
    D2 = np.empty((m, m, n, n), complex)
    for a in range(m):
        D1[a] = (G[1 + 2 * a] - G[2 + 2 * a]) / (2 * h)
        D2[a, a] = (G[1 + 2 * a] - 2 * g0 + G[2 + 2 * a]) / h ** 2
    i = 1 + 2 * m
    for a in range(m):
        for b in range(a + 1, m):
            pp, pm, mp, mm = G[i:i + 4]
            D2[a, b] = D2[b, a] = (pp - pm - mp + mm) / (4 * h * h)
            i += 4
    X, Y = slice(0, n), slice(n, m)
    d1 = 0.5 * (D1[X] - 1j * D1[Y])
    d1bar = 0.5 * (D1[X] + 1j * D1[Y])
    d2 = 0.25 * (D2[X, X] + D2[Y, Y] + 1j * (D2[X, Y] - D2[Y, X]))
    return MetricJet(value=g0, d1=d1, d1bar=d1bar, d2=d2, order=2)


def _jet_error(a: MetricJet, b: MetricJet) -> float:
    return float(max(np.max(np.abs(a.d1 - b.d1)), np.max(np.abs(a.d1bar - b.d1bar)),
                     np.max(np.abs(a.d2 - b.d2))))


def jet_consistency_check(metric: MetricField, p, h: float = 1e-2, accuracy_step: float = 1e-4,
                          rtol: float = 1e-6, ratio_range=(3.5, 4.5)):
    """Exact jets against finite differences: accuracy at ``accuracy_step``, order 2 under halving."""
    p = as_point(p)
    exact = evaluate_jet(metric, p)
    scale = max(1.0, float(np.max(np.abs(exact.d2))), float(np.max(np.abs(exact.d1))))
    err = _jet_error(exact, finite_difference_jet(metric, p, accuracy_step)) / scale
    e1 = _jet_error(exact, finite_difference_jet(metric, p, h))
    e2 = _jet_error(exact, finite_difference_jet(metric, p, h / 2))
    trivial = e1 <= 1e-12 * scale
    ratio = None if trivial else e1 / e2
    rep = compare("jet-consistency", err, 0.0, "<=", rtol,
                  witness={"metric": metric.name, "point": p.coords, "h": h},
                  convergence_ratio=ratio, error_h=e1, error_half=e2)
    if ratio is not None and not ratio_range[0] <= ratio <= ratio_range[1]:
        rep.status = "fail"
        rep.details["reason"] = "finite differences do not converge at second order"
    return rep


def hermitian_check(metric: MetricField, p, tol: float = 1e-12):
    jet = evaluate_jet(metric, p)
    defect = jet.hermitian_defect()
    return compare("jet-hermitian-symmetry", defect, 0.0, "==", tol,
                   witness={"metric": metric.name, "point": as_point(p).coords})
