"""Properties of solved approximate Kahler-Einstein states."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from ..curvature import TWO_PI
from ..errors import SolverError
from ..report import VerificationReport, combine, compare
from .solver import MASolveState, TorusMAProblem, real_det, solve


def volume_form_integral(problem: TorusMAProblem, density: np.ndarray) -> float:
    """``int omega^n`` for a metric with ``det`` grid ``density``: ``n! 2^n int det dA``."""
    n = problem.n
    return factorial(n) * 2 ** n * problem.grid.integrate(density)


def verify_ke_relation(problem: TorusMAProblem, state: MASolveState,
                       tol: float = 1e-6) -> VerificationReport:
    """``Ric(omega_eps) = -omega_eps + eps omega`` with spectral ``d dbar log det``."""
    if not state.converged:
        raise SolverError("state is not a converged solution", state)
    A = problem.matrix(state.u)
    logdet = np.log(real_det(A))
    ric_eps = -problem.grid.ddbar(logdet) / TWO_PI
    defect = float(np.max(np.abs(ric_eps + A - problem.eps * problem.metric)))
    return compare("ke-relation", defect, 0.0, "<=", tol,
                   witness={"eps": problem.eps, "grid": problem.size, "n": problem.n},
                   max_defect=defect)


def sup_bound_constant(problem: TorusMAProblem, eps0: float = 1.0) -> float:
    """``C = log max (det(eps0 g - Ric) / det g)``; requires positivity on the grid."""
    B = eps0 * problem.metric - problem.ricci_form
    if np.min(np.linalg.eigvalsh(B)) <= 0:
        raise ValueError(f"eps0 = {eps0} does not make eps0 omega - Ric positive")
    ratio = real_det(B) / real_det(problem.metric)
    return float(np.log(np.max(ratio)))


def verify_sup_bound(problem: TorusMAProblem, state: MASolveState, eps0: float = 1.0,
                     u: np.ndarray | None = None) -> VerificationReport:
    """``sup u_eps <= C`` for ``eps < eps0``; ``u`` overrides the state (negative controls)."""
    if not eps0 > problem.eps:
        raise ValueError("eps0 must exceed eps")
    C = sup_bound_constant(problem, eps0)
    u = state.u if u is None else u
    sup = float(np.max(u))
    return compare("sup-upper-bound", sup, C, "<=", 0.0,
                   witness={"eps": problem.eps, "eps0": eps0, "argmax": int(np.argmax(u))},
                   sup_u=sup, C=C)


def elementary_trace_check(problem: TorusMAProblem, state: MASolveState,
                           rtol: float = 1e-9) -> VerificationReport:
    """``tr_omega omega_eps <= (tr_{omega_eps} omega)^{n-1} e^u / (n-1)!`` on every grid point."""
    n = problem.n
    A = problem.matrix(state.u)
    g = problem.metric
    lhs = np.real(np.trace(np.linalg.solve(g, A), axis1=-2, axis2=-1))
    tr_inv = np.real(np.trace(np.linalg.solve(A, g), axis1=-2, axis2=-1))
    rhs = tr_inv ** (n - 1) * np.exp(state.u) / factorial(n - 1)
    rel = (lhs - rhs) / np.maximum(np.abs(rhs), 1e-300)
    worst = int(np.argmax(rel))
    return compare("elementary-trace-inequality", float(rel.flat[worst]), 0.0, "<=", rtol,
                   witness={"grid_index": worst, "eps": problem.eps},
                   lhs_at_worst=float(lhs.flat[worst]), rhs_at_worst=float(rhs.flat[worst]))


@dataclass
class EpsSweepRecord:
    eps: list = field(default_factory=list)
    integrals: list = field(default_factory=list)
    sup_u: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    reference_volume: float = float("nan")
    n: int = 1
    complete: bool = True
    error: str | None = None

    @property
    def slope(self) -> float:
        """Least-squares slope of ``log integral`` against ``log eps``."""
        if len(self.eps) < 2:
            return float("nan")
        return float(np.polyfit(np.log(self.eps), np.log(self.integrals), 1)[0])

    def running_slopes(self) -> list[float]:
        out = [float("nan")]
        for k in range(2, len(self.eps) + 1):
            out.append(float(np.polyfit(np.log(self.eps[:k]), np.log(self.integrals[:k]), 1)[0]))
        return out


def eps_sweep(problem: TorusMAProblem, eps_list, tol: float = 1e-11,
              checks: list | None = None) -> EpsSweepRecord:
    """Solve along decreasing ``eps`` with continuation; record volumes and ``sup u``.

    ``checks`` collects the elementary trace inequality report of every solve.
    A solver failure stops the sweep and returns the partial record.
    """
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])) or min(eps_list) <= 0:
        raise ValueError("eps values must be positive and strictly decreasing")
    rec = EpsSweepRecord(n=problem.n,
                         reference_volume=volume_form_integral(problem,
                                                               real_det(problem.metric)))
    u_prev, eps_prev = None, None
    for eps in eps_list:
        prob = problem.with_eps(eps)
        guess = None if u_prev is None else u_prev + problem.n * np.log(eps / eps_prev)
        try:
            try:
                st = solve(prob, tol=tol, u0=guess)
            except SolverError:
                if guess is None:
                    raise
                st = solve(prob, tol=tol)
        except SolverError as exc:
            rec.complete = False
            rec.error = f"eps={eps}: {exc}"
            break
        dens = real_det(prob.matrix(st.u))
        rec.eps.append(eps)
        rec.integrals.append(volume_form_integral(prob, dens))
        rec.sup_u.append(float(np.max(st.u)))
        rec.residuals.append(st.residual_norm)
        if checks is not None:
            checks.append(elementary_trace_check(prob, st))
        u_prev, eps_prev = st.u, eps
    return rec


def volume_slope_check(record: EpsSweepRecord, rel: float = 0.02) -> VerificationReport:
    """Fitted slope of the volume against ``eps`` equals ``n`` within ``rel``."""
    return compare("volume-slope", record.slope, float(record.n), "==", rel * record.n,
                   witness={"eps": record.eps}, integrals=record.integrals,
                   complete=record.complete)


# ------------------------------------------------------------ integral inequality chain

def sup_lower_bound(n: int, kappa: float) -> float:
    """``-n log(4 pi n / ((n + 1) kappa))``."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return -n * np.log(4 * np.pi * n / ((n + 1) * kappa))


def integral_chain_check(n: int, kappa: float, C_eps: float,
                         sup_u: float | None = None) -> VerificationReport:
    """``C_eps (n+1) kappa / (2n) <= 2 pi`` and, given ``sup u``, the implied lower bound."""
    if kappa <= 0:
        raise ValueError("kappa must be positive for the integral inequality")
    chain = compare("integral-inequality", C_eps * (n + 1) * kappa / (2 * n), TWO_PI, "<=", 1e-12,
                    witness={"n": n, "kappa": kappa, "C_eps": C_eps})
    reports = [chain]
    bound = sup_lower_bound(n, kappa)
    if sup_u is not None:
        reports.append(compare("sup-lower-bound", sup_u, bound, ">=", 1e-12,
                               witness={"n": n, "kappa": kappa}))
    out = combine("integral-inequality", reports, witness={"n": n, "kappa": kappa})
    out.lhs, out.rhs, out.slack = chain.lhs, chain.rhs, chain.slack
    out.relation, out.tolerance = "<=", chain.tolerance
    out.details.update(sup_lower_bound=bound, sub_reports=[r.to_record() for r in reports])
    return out


@dataclass(frozen=True)
class DiscSurrogate:
    """Disc model where the approximate equation is solved in closed form at ``eps = 0``.

    ``omega`` is the disc metric ``scale (1 - |z|^2)^-2`` with constant HSC
    ``-2/scale``; ``omega_KE = omega / (pi scale)`` solves
    ``omega_KE = -Ric(omega) + (i/2pi) d dbar u`` with the constant
    ``u = -log(pi scale)``.
    """

    scale: float = 1.0

    @property
    def kappa(self) -> float:
        return 2.0 / self.scale

    @property
    def u(self) -> float:
        return -np.log(np.pi * self.scale)

    @property
    def S(self) -> float:
        """``tr_{omega_KE} omega``."""
        return np.pi * self.scale

    def density(self, z: np.ndarray) -> np.ndarray:
        return self.scale / (1.0 - np.abs(z) ** 2) ** 2


def surrogate_integral_check(surrogate: DiscSurrogate = DiscSurrogate(), radius: float = 0.5,
                             nodes: int = 64) -> VerificationReport:
    """Weighted integral form on a disc of ``radius`` with a smooth compact weight.

    ``int (n+1) kappa/(2n) S w omega_KE  <=  2 pi int w omega_KE`` with Gauss quadrature in ``r``.
    """
    n = 1
    r, wr = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * radius * (r + 1)
    wr = 0.5 * radius * wr
    weight = (1 - (r / radius) ** 2) ** 3
    dens_ke = surrogate.density(r) / (np.pi * surrogate.scale)
    base = float(np.sum(wr * 2 * np.pi * r * weight * dens_ke))
    lhs = (n + 1) * surrogate.kappa / (2 * n) * surrogate.S * base
    rhs = TWO_PI * base
    return compare("integral-inequality", lhs, rhs, "<=", 1e-12 * rhs,
                   witness={"surrogate": "disc", "scale": surrogate.scale, "radius": radius},
                   C_eps=float(np.exp(-surrogate.u)), sup_u=surrogate.u)


def integral_inequality_check(surrogate: DiscSurrogate = DiscSurrogate(), u=None,
                              n: int = 1) -> VerificationReport:
    """Chain with measured ``C_eps = inf exp(-u/n)`` and ``sup u``, plus the weighted integral.

    ``u`` is a grid or scalar solution on the surrogate background; it
    defaults to the closed-form solution of ``surrogate``.
    """
    u = np.atleast_1d(np.asarray(surrogate.u if u is None else u, dtype=float))
    C_eps = float(np.min(np.exp(-u / n)))
    chain = integral_chain_check(n, surrogate.kappa, C_eps, float(np.max(u)))
    weighted = surrogate_integral_check(surrogate)
    out = combine("integral-inequality", [chain, weighted],
                  witness={"surrogate": "disc", "scale": surrogate.scale, "n": n})
    out.lhs, out.rhs, out.slack = chain.lhs, chain.rhs, chain.slack
    out.relation, out.tolerance = chain.relation, chain.tolerance
    out.details.update(C_eps=C_eps, sup_u=float(np.max(u)),
                       sup_lower_bound=chain.details["sup_lower_bound"],
                       weighted_lhs=weighted.lhs, weighted_rhs=weighted.rhs)
    return out
