"""Damped Newton solver for the approximate Kahler-Einstein equation on the torus.

Unknown ``u`` on the unit cell; with ``rho`` the Ricci coefficients of the
background ``g``,

    A(u) = eps g - rho / 2pi + (1/2pi) d dbar u          (matrix of omega_eps)
    F(u) = log det A(u) - u - log det g = 0              (omega_eps^n = e^u omega^n)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from ..curvature import TWO_PI, ricci_batch
from ..errors import NotPositiveDefinite, SolverError
from ..geometry.metric import MetricField
from ..geometry.models import build_model
from .spectral import SpectralGrid

log = logging.getLogger(__name__)

TORUS_BACKGROUNDS = ("flat", "perturbed-torus")


@dataclass(eq=False)
class TorusMAProblem:
    n: int
    grid: SpectralGrid
    background: MetricField
    eps: float
    metric: np.ndarray
    ricci: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def ricci_form(self) -> np.ndarray:
        """Coefficient matrix of the Ricci form against ``i dz ^ dzbar``."""
        return self.ricci / TWO_PI

    @property
    def logdet_metric(self) -> np.ndarray:
        return np.log(real_det(self.metric))

    def matrix(self, u: np.ndarray) -> np.ndarray:
        return self.eps * self.metric - self.ricci_form + self.grid.ddbar(u) / TWO_PI

    def with_eps(self, eps: float) -> "TorusMAProblem":
        if eps <= 0:
            raise ValueError("eps must be positive")
        return TorusMAProblem(self.n, self.grid, self.background, eps, self.metric, self.ricci,
                              self.params)


@dataclass(eq=False)
class MASolveState:
    u: np.ndarray
    residual_norm: float
    positivity_margin: float
    iterations: int
    converged: bool
    density_residual: float = float("nan")
    history: list = field(default_factory=list)


def assemble_problem(background: str = "flat", params: dict | None = None, eps: float = 0.1,
                     grid: int = 32) -> TorusMAProblem:
    """Sample the background metric and its Ricci coefficients on the grid."""
    if background not in TORUS_BACKGROUNDS:
        raise ValueError(f"background must be one of {TORUS_BACKGROUNDS}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    params = dict(params or {})
    metric = build_model(background, **params)
    n = metric.n
    sg = SpectralGrid(n, grid)
    pts = sg.points.reshape(-1, n)
    jets = metric.jets(pts)
    g = jets.value.reshape(sg.shape + (n, n))
    if np.min(np.linalg.eigvalsh(g)) <= 0:
        raise NotPositiveDefinite("background metric is not positive on the grid")
    # periodicity: the metric must agree on opposite faces of the cell
    for j in range(n):
        for shift in (1.0, 1j):
            moved = pts.copy()
            moved[:, j] += shift
            if np.max(np.abs(metric.values(moved[:64]) - jets.value[:64])) > 1e-10:
                raise ValueError("background metric is not periodic on the unit cell")
    rho = ricci_batch(jets).reshape(sg.shape + (n, n))
    return TorusMAProblem(n, sg, metric, float(eps), g, rho, params)


def real_det(A: np.ndarray) -> np.ndarray:
    """Real part of ``det`` over the trailing two axes of a Hermitian matrix field."""
    # closed forms for n <= 2: LAPACK's LU is off by an ulp even on 1x1 input
    n = A.shape[-1]
    if n == 1:
        return np.real(A[..., 0, 0])
    if n == 2:
        return np.real(A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0])
    return np.real(np.linalg.det(A))


def _logdet(A: np.ndarray) -> np.ndarray:
    # non-positive trial matrices give nan, which the line search rejects
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.log(real_det(A))


def _min_eig(A: np.ndarray) -> float:
    return float(np.min(np.linalg.eigvalsh(A)))


def residual(problem: TorusMAProblem, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A = problem.matrix(u)
    return _logdet(A) - u - problem.logdet_metric, A


def default_initial_guess(problem: TorusMAProblem) -> np.ndarray:
    """``n log eps - (log det g - mean)``: makes ``A = eps g`` exactly, hence positive."""
    ld = problem.logdet_metric
    return problem.n * np.log(problem.eps) - (ld - ld.mean())


def solve(problem: TorusMAProblem, tol: float = 1e-11, max_iter: int = 50,
          u0: np.ndarray | None = None, min_step: float = 1e-8,
          floor_tol: float | None = None) -> MASolveState:
    """Newton iteration with GMRES, flat spectral preconditioning and Armijo damping.

    ``residual_norm`` is ``max |F(u)|``, the relative density residual in log
    form. When no step reduces a residual already below ``floor_tol``
    (default ``100 tol``) the iterate is accepted as converged at the
    round-off floor. Raises SolverError if the iteration budget or the step
    floor is hit otherwise.
    """
    floor_tol = 100 * tol if floor_tol is None else floor_tol
    stalled = False
    sg = problem.grid
    shape = sg.shape
    u = default_initial_guess(problem) if u0 is None else np.array(u0, dtype=float)
    F, A = residual(problem, u)
    margin = _min_eig(A)
    if margin <= 0:
        raise SolverError("initial guess does not give a positive omega_eps",
                          MASolveState(u, float(np.max(np.abs(F))), margin, 0, False))
    history = []
    size = int(np.prod(shape))
    diag_syms = np.stack([sg.ddbar_symbols[j, j] for j in range(problem.n)])
    r = float(np.max(np.abs(F)))
    it = 0
    for it in range(max_iter + 1):
        history.append({"iteration": it, "residual": r, "positivity_margin": margin})
        log.debug("newton %d residual %.3e margin %.3e", it, r, margin)
        if r <= tol:
            break
        if it == max_iter:
            raise SolverError(f"no convergence in {max_iter} iterations (residual {r:.3e})",
                              MASolveState(u, r, margin, it, False, history=history))
        Ainv = np.linalg.inv(A)

        def jac(v):
            v = v.reshape(shape)
            H = sg.ddbar(v)
            return (np.real(np.einsum("...kj,...jk->...", Ainv, H)) / TWO_PI - v).ravel()

        coef = np.real(np.array([Ainv[..., j, j].mean() for j in range(problem.n)]))
        symbol = np.einsum("j,j...->...", coef, diag_syms).real / TWO_PI - 1.0

        def precond(v):
            return np.real(np.fft.ifftn(np.fft.fftn(v.reshape(shape)) / symbol)).ravel()

        J = LinearOperator((size, size), matvec=jac, dtype=float)
        M = LinearOperator((size, size), matvec=precond, dtype=float)
        rtol = max(1e-14, min(1e-3, 0.1 * r))
        delta, info = gmres(J, -F.ravel(), rtol=rtol, atol=0.0, restart=60, maxiter=20, M=M)
        delta = delta.reshape(shape)
        step = 1.0
        while True:
            cand = u + step * delta
            Fc, Ac = residual(problem, cand)
            mc = _min_eig(Ac)
            rc = float(np.max(np.abs(Fc)))
            if mc > 0 and np.isfinite(rc) and rc <= (1 - 1e-4 * step) * r:
                break
            step *= 0.5
            if step < min_step and r <= floor_tol:
                stalled = True
                break
            if step < min_step:
                raise SolverError("line search failed (positivity or descent)",
                                  MASolveState(u, r, margin, it, False, history=history))
        if stalled:
            history[-1].update(note="round-off floor reached")
            break
        u, F, A, margin, r = cand, Fc, Ac, mc, rc
        history[-1].update(step=step, gmres_info=int(info))
    density = float(np.max(np.abs(real_det(A)
                                  - np.exp(u) * real_det(problem.metric))))
    return MASolveState(u=u, residual_norm=r, positivity_margin=margin, iterations=it,
                        converged=True, density_residual=density, history=history)
