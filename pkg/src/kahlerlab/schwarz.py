"""Trace of one Kahler metric against another and its second-order estimates.

For a pair ``(omega, omega')`` the trace ``S = tr_{omega'} omega`` satisfies,
in coordinates that are normal for ``omega`` and diagonalise ``omega'`` with
eigenvalues ``lam`` at the point,

    tr_{omega'} i d dbar S = sum rho'_ll / lam_l^2
                             + sum |d_j g'_{a lbar}|^2 / (lam_j lam_l^2 lam_a)
                             - sum c_{jjll} / (lam_j lam_l)

where ``rho'`` is the Ricci coefficient matrix of ``omega'`` and ``c`` the
curvature of ``omega``. The left side is the operator written ``-Laplacian``
in the estimates below; it is computed independently by finite differences.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh

from .curvature import TWO_PI, chern_curvature, ricci_and_scalar
from .errors import NotPositiveDefinite
from .geometry.chart import ChartPoint, as_point
from .geometry.metric import MetricField, MetricJet, evaluate_jet, normal_coordinates, transform_jet
from .report import FAIL, PASS, SKIPPED, VerificationReport, combine, compare, skipped
from .royden import BiHermitianForm, hsc_upper_bound

LEMMA_TOL = 1e-9
FD_FLOOR = 1e-4
DEFAULT_STEP = 1e-3
HYPOTHESIS_SAMPLES = 2000


@dataclass(frozen=True, eq=False)
class MetricPair:
    base: MetricField
    prime: MetricField
    point: ChartPoint

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point))
        if self.base.n != self.prime.n or self.point.n != self.base.n:
            raise ValueError("pair members and point must share one dimension")
        self.base.domain.require(self.point)
        self.prime.domain.require(self.point)

    @property
    def n(self) -> int:
        return self.base.n

    def at(self, p) -> "MetricPair":
        return MetricPair(self.base, self.prime, p)


@dataclass(frozen=True)
class TraceState:
    S: float
    T: float
    eigenvalues: np.ndarray
    S_form_ratio: float


def _pair_jets(pair: MetricPair) -> tuple[MetricJet, MetricJet]:
    return evaluate_jet(pair.base, pair.point), evaluate_jet(pair.prime, pair.point)


def mixed_determinant_trace(g: np.ndarray, gp: np.ndarray) -> float:
    """``n omega'^{n-1} ^ omega / omega'^n`` by row replacement in ``det``."""
    n = g.shape[0]
    total = 0j
    for j in range(n):
        M = gp.copy()
        M[j, :] = g[j, :]
        total += np.linalg.det(M)
    return float(np.real(total / np.linalg.det(gp)))


def trace_state(pair: MetricPair) -> TraceState:
    """``S`` from generalised eigenvalues and from the form ratio."""
    g = pair.base.value(pair.point)
    gp = pair.prime.value(pair.point)
    try:
        lam = eigh(gp.T, g.T, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"degenerate metric pair at {pair.point!r}") from exc
    if np.any(lam <= 0):
        raise NotPositiveDefinite(f"omega' is not positive at {pair.point!r}")
    S = float(np.sum(1.0 / lam))
    return TraceState(S=S, T=float(np.log(S)), eigenvalues=lam,
                      S_form_ratio=mixed_determinant_trace(g, gp))


def trace_dual_path_check(pair: MetricPair, tol: float = 1e-10) -> VerificationReport:
    st = trace_state(pair)
    return compare("trace-dual-path", st.S, st.S_form_ratio, "==", tol * max(1.0, st.S),
                   witness={"point": pair.point.coords}, eigenvalues=st.eigenvalues)


def trace_values(pair: MetricPair, points: np.ndarray) -> np.ndarray:
    """``S`` at a batch of points."""
    g = pair.base.values(points)
    gp = pair.prime.values(points)
    return np.real(np.trace(np.linalg.solve(gp, g), axis1=1, axis2=2))


# ---------------------------------------------------------------- finite differences

def complex_hessian_fd(func: Callable[[np.ndarray], np.ndarray], z: np.ndarray,
                       h: float) -> np.ndarray:
    """``H[j, k] = d_j dbar_k f`` at ``z`` by second-order central differences.

    ``func`` maps a batch ``(m, n)`` of complex points to ``(m,)`` reals.
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    m = 2 * n
    E = np.zeros((m, n), complex)
    E[np.arange(n), np.arange(n)] = 1.0
    E[n + np.arange(n), np.arange(n)] = 1j
    pts = [z]
    for a in range(m):
        pts += [z + h * E[a], z - h * E[a]]
    pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
    for a, b in pairs:
        for sa in (1, -1):
            for sb in (1, -1):
                pts.append(z + h * (sa * E[a] + sb * E[b]))
    f = np.asarray(func(np.array(pts)), dtype=float)
    f0 = f[0]
    D = np.empty((m, m))
    for a in range(m):
        D[a, a] = (f[1 + 2 * a] - 2 * f0 + f[2 + 2 * a]) / h ** 2
    base = 1 + 2 * m
    for i, (a, b) in enumerate(pairs):
        pp, pm, mp, mm = f[base + 4 * i: base + 4 * i + 4]
        D[a, b] = D[b, a] = (pp - pm - mp + mm) / (4 * h * h)
    X, Y = slice(0, n), slice(n, m)
    return 0.25 * (D[X, X] + D[Y, Y] + 1j * (D[X, Y] - D[Y, X]))


def trace_laplacian_fd(pair: MetricPair, func, h: float) -> float:
    """``tr_{omega'} i d dbar f`` at the pair point (the operator ``-Laplacian_{omega'}``)."""
    H = complex_hessian_fd(func, pair.point.coords, h)
    Wp = np.linalg.inv(pair.prime.value(pair.point))
    return float(np.real(np.einsum("kj,jk->", Wp, H)))


# ---------------------------------------------------------------- jet side

@dataclass(frozen=True, eq=False)
class SchwarzTerms:
    """Jet-side quantities at one point, in normal coordinates for ``omega``."""

    S: float
    lam: np.ndarray
    ricci_term: float
    gradient_term: float
    curvature_term: float
    grad_S_norm2: float
    base_coeffs: np.ndarray
    prime_ricci: np.ndarray
    base_ricci: np.ndarray

    @property
    def laplacian_S(self) -> float:
        return self.ricci_term + self.gradient_term - self.curvature_term

    @property
    def laplacian_log_S(self) -> float:
        return self.laplacian_S / self.S - self.grad_S_norm2 / self.S ** 2


def schwarz_terms(pair: MetricPair, frame: np.ndarray | None = None) -> SchwarzTerms:
    """Assemble the three terms of the trace Laplacian from exact jets.

    ``frame`` (unitary, optional) rotates the normal coordinates first; the
    result is independent of it.
    """
    jet, jetp = _pair_jets(pair)
    L, Q, lam = normal_coordinates(jet, jetp)
    if frame is not None:
        # unitary rotation keeps omega normal; omega' is no longer diagonal
        L = L @ frame
        lin = transform_jet(jet, L)
        Q = -np.transpose(lin.d1, (2, 1, 0))
        Q = 0.5 * (Q + Q.transpose(0, 2, 1))
    nb = transform_jet(jet, L, Q)
    npj = transform_jet(jetp, L, Q)
    gp = npj.value
    # in normal coordinates g = I; gp is diagonal only without a rotating frame
    Wp = np.linalg.inv(gp)
    tensor = chern_curvature(nb)
    rho_p = ricci_and_scalar(chern_curvature(npj)).ricci
    rho_b = ricci_and_scalar(tensor).ricci
    R = tensor.coeffs
    # tr_{omega'} i d dbar S written invariantly in coordinates with g = I, dg = 0
    ricci_term = np.einsum("al,lm,mb,ba->", Wp, rho_p, Wp, np.eye(len(lam)))
    d1 = npj.d1
    # the antiholomorphic slot of d g' is contracted through W' g W' = W'^2
    grad = np.einsum("kj,jab,bc,kdc,da->", Wp, d1, Wp @ Wp, d1.conj(), Wp, optimize=True)
    curv = np.einsum("kj,jkab,ba->", Wp, R, Wp)
    # d_j S = -tr(W' d_j g' W') when g = I and dg = 0
    dS = -np.einsum("ab,jbc,ca->j", Wp, d1, Wp)
    grad_S = np.einsum("kj,j,k->", Wp, dS, dS.conj())
    S = float(np.real(np.trace(Wp)))
    return SchwarzTerms(S=S, lam=lam, ricci_term=float(np.real(ricci_term)),
                        gradient_term=float(np.real(grad)), curvature_term=float(np.real(curv)),
                        grad_S_norm2=float(np.real(grad_S)), base_coeffs=R, prime_ricci=rho_p,
                        base_ricci=rho_b)


def _relative(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def laplacian_equality_check(pair: MetricPair, h: float = DEFAULT_STEP, tol: float = FD_FLOOR,
                             ratio_range=(3.5, 4.5)) -> VerificationReport:
    """Finite-difference trace Laplacian of ``S`` against the three-term jet formula.

    Also measures the error ratio under halving of ``h``; the convergence
    entry is ``None`` when both errors sit at round-off level.
    """
    terms = schwarz_terms(pair)
    rhs = terms.laplacian_S
    f = lambda pts: trace_values(pair, pts)  # noqa: E731
    lhs = trace_laplacian_fd(pair, f, h)
    lhs_half = trace_laplacian_fd(pair, f, h / 2)
    e1, e2 = abs(lhs - rhs), abs(lhs_half - rhs)
    floor = 1e-9 * max(1.0, abs(rhs))
    ratio = e1 / e2 if e2 > 0 and e1 > floor else None
    defect = _relative(lhs, rhs)
    rep = compare("laplacian-equality", defect, 0.0, "<=", tol,
                  witness={"point": pair.point.coords, "base": pair.base.name,
                           "prime": pair.prime.name, "h": h},
                  fd_value=lhs, jet_value=rhs, relative_defect=defect,
                  error=e1, error_half=e2, convergence_ratio=ratio,
                  ricci_term=terms.ricci_term, gradient_term=terms.gradient_term,
                  curvature_term=terms.curvature_term, eigenvalues=terms.lam)
    if ratio is not None and not ratio_range[0] <= ratio <= ratio_range[1]:
        rep.status = FAIL
        rep.details["reason"] = "finite differences do not converge at second order"
    return rep


# ---------------------------------------------------------------- estimate lemmas

def ricci_hypothesis_margin(pair: MetricPair, lambda_: float, mu: float) -> float:
    """Smallest eigenvalue of ``Ric(omega') + lambda omega' - mu omega`` relative to ``omega``."""
    jet, jetp = _pair_jets(pair)
    rho_p = ricci_and_scalar(chern_curvature(jetp)).ricci
    M = rho_p / TWO_PI + lambda_ * jetp.value - mu * jet.value
    return float(eigh(M.T, jet.value.T, eigvals_only=True)[0])


def einstein_lower_constant(pair: MetricPair) -> float:
    """Smallest ``lambda >= 0`` with ``Ric(omega') + lambda omega' >= 0`` at the point."""
    jetp = evaluate_jet(pair.prime, pair.point)
    rho_p = ricci_and_scalar(chern_curvature(jetp)).ricci
    low = eigh((rho_p / TWO_PI).T, jetp.value.T, eigvals_only=True)[0]
    return max(0.0, float(-low))


def max_hsc(coeffs: np.ndarray, samples: int = HYPOTHESIS_SAMPLES, steps: int = 50,
            rng: np.random.Generator | None = None) -> float:
    """Empirical maximum of HSC for unitary-frame coefficients."""
    return hsc_upper_bound(BiHermitianForm(coeffs), samples=samples, steps=steps, rng=rng)


def kappa_estimate(metric: MetricField, p, samples: int = HYPOTHESIS_SAMPLES, steps: int = 50,
                   rng: np.random.Generator | None = None) -> float:
    """``kappa(x) = max(0, -max_v HSC(x, v))`` from sphere sampling plus ascent."""
    from .curvature import unitary_frame
    tensor = unitary_frame(chern_curvature(evaluate_jet(metric, p)))
    return max(0.0, -max_hsc(tensor.coeffs, samples, steps, rng))


def estimate_lemma_checks(pair: MetricPair, lambda_: float = 0.0, mu: float = 0.0,
                          kappa: float = 0.0, enforce_hypotheses: bool = True,
                          rng: np.random.Generator | None = None,
                          terms: SchwarzTerms | None = None,
                          tol: float = LEMMA_TOL) -> VerificationReport:
    """The Ricci, gradient and curvature term lemmas at the pair point.

    Hypotheses are tested numerically; a failed hypothesis yields a
    ``skipped-hypothesis`` sub-report unless ``enforce_hypotheses`` is off.
    """
    if min(lambda_, mu, kappa) < 0:
        raise ValueError("lambda, mu and kappa must be non-negative")
    terms = schwarz_terms(pair) if terms is None else terms
    n = pair.n
    S = terms.S
    witness = {"point": pair.point.coords, "lambda": lambda_, "mu": mu, "kappa": kappa}

    margin = ricci_hypothesis_margin(pair, lambda_, mu)
    rhs1 = TWO_PI * (-lambda_ * S + mu * S * S / n)
    if margin < -tol and enforce_hypotheses:
        r1 = skipped("lemma-ricci-term", "Ric(omega') + lambda omega' - mu omega is not "
                     "positive semidefinite", witness=witness, margin=margin)
    else:
        r1 = compare("lemma-ricci-term", terms.ricci_term, rhs1, ">=", tol * max(1.0, abs(rhs1)),
                     witness=witness, hypothesis_margin=margin)

    rhs2 = terms.grad_S_norm2 / S
    r2 = compare("lemma-gradient-term", terms.gradient_term, rhs2, ">=",
                 tol * max(1.0, abs(rhs2)), witness=witness)

    top = max_hsc(terms.base_coeffs, rng=rng)
    rhs3 = -kappa * (n + 1) / (2 * n) * S * S
    if top > -kappa + tol and enforce_hypotheses:
        r3 = skipped("lemma-curvature-term", "sampled HSC exceeds -kappa", witness=witness,
                     max_hsc=top)
    else:
        r3 = compare("lemma-curvature-term", terms.curvature_term, rhs3, "<=",
                     tol * max(1.0, abs(rhs3)), witness=witness, max_hsc=top)
    out = combine("estimate-lemmas", [r1, r2, r3], witness=witness)
    out.details["sub_reports"] = [r.to_record() for r in (r1, r2, r3)]
    out.details["parts"] = {r.claim_id: r for r in (r1, r2, r3)}
    return out


def wu_yau_inequality_check(pair: MetricPair, lambda_: float = 0.0, mu: float = 0.0,
                            kappa: float = 0.0, h: float = DEFAULT_STEP,
                            tol: float = LEMMA_TOL, terms: SchwarzTerms | None = None,
                            fd: bool = True) -> VerificationReport:
    """``-Laplacian log S >= (kappa(n+1)/(2n) + 2 pi mu/n) S - 2 pi lambda``.

    The verdict uses the exact jet value of the left side; the finite
    difference value must agree with it to ``max(1e-4, 100 h^2)`` relative.
    """
    terms = schwarz_terms(pair) if terms is None else terms
    n = pair.n
    S = terms.S
    rhs = (kappa * (n + 1) / (2 * n) + TWO_PI * mu / n) * S - TWO_PI * lambda_
    lhs = terms.laplacian_log_S
    witness = {"point": pair.point.coords, "lambda": lambda_, "mu": mu, "kappa": kappa, "h": h}
    rep = compare("diffineq", lhs, rhs, ">=", tol * max(1.0, abs(rhs)), witness=witness, S=S)
    if fd:
        lhs_fd = trace_laplacian_fd(pair, lambda pts: np.log(trace_values(pair, pts)), h)
        fd_tol = max(FD_FLOOR, 100 * h * h) * max(1.0, abs(lhs))
        rep.details.update(fd_value=lhs_fd, fd_tolerance=fd_tol)
        if abs(lhs_fd - lhs) > fd_tol:
            rep.status = FAIL
            rep.details["reason"] = "finite-difference left side disagrees with jets"
    return rep


def lemma_chain_check(pair: MetricPair, lambda_: float, mu: float, kappa: float,
                      h: float = DEFAULT_STEP, rng: np.random.Generator | None = None,
                      fd: bool = True) -> VerificationReport:
    """If all three lemmas pass, the assembled inequality must pass too."""
    terms = schwarz_terms(pair)
    lemmas = estimate_lemma_checks(pair, lambda_, mu, kappa, rng=rng, terms=terms)
    ineq = wu_yau_inequality_check(pair, lambda_, mu, kappa, h=h, terms=terms, fd=fd)
    all_pass = all(r.status == PASS for r in lemmas.details["parts"].values())
    witness = {"point": pair.point.coords}
    if not all_pass:
        status = FAIL if lemmas.failed else SKIPPED
        rep = VerificationReport("lemma-chain", status, witness=witness,
                                 details={"reason": "lemma hypotheses or lemmas not all passing"})
    else:
        rep = VerificationReport("lemma-chain", PASS if ineq.passed else FAIL, lhs=ineq.lhs,
                                 rhs=ineq.rhs, slack=ineq.slack, tolerance=ineq.tolerance,
                                 relation=">=", witness=witness)
    rep.details.update(lemmas=lemmas, inequality=ineq)
    return rep


# ---------------------------------------------------------------- trace lemma

def trace_lemma_check(u: float | None, lambdas) -> VerificationReport:
    """``T = log sum 1/lambda_l > -u/n`` with ``u = sum log lambda_l``.

    Strict for ``n >= 2``; for ``n = 1`` both sides coincide and the report
    passes with slack 0 and a boundary note.
    """
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    n = lam.size
    u_true = float(np.sum(np.log(lam)))
    flagged = u is not None and abs(u - u_true) > 1e-9
    T = float(np.log(np.sum(1.0 / lam)))
    rhs = -u_true / n
    slack = T - rhs
    details = {"n": n, "u_inconsistent": flagged, "u_passed": u}
    if n == 1:
        details["boundary"] = "n = 1: T equals -u exactly"
        return VerificationReport("trace-lemma", PASS, lhs=T, rhs=rhs, slack=0.0, tolerance=0.0,
                                  relation=">=", witness={"lambdas": lam}, details=details)
    status = PASS if slack > 0 else FAIL
    return VerificationReport("trace-lemma", status, lhs=T, rhs=rhs, slack=slack, tolerance=0.0,
                              relation=">=", witness={"lambdas": lam}, details=details)


def trace_lemma_sweep(count: int = 100_000, seed: int = 0, n_range=(2, 6),
                      spread: float = 3.0) -> VerificationReport:
    """Vectorised strict check over random log-normal eigenvalue vectors."""
    rng = np.random.default_rng(seed)
    ns = rng.integers(n_range[0], n_range[1] + 1, count)
    worst = np.inf
    violations = 0
    witness = {}
    for n in range(n_range[0], n_range[1] + 1):
        m = int(np.sum(ns == n))
        if not m:
            continue
        lam = np.exp(spread * rng.standard_normal((m, n)))
        slack = np.log(np.sum(1.0 / lam, axis=1)) + np.sum(np.log(lam), axis=1) / n
        bad = slack <= 0
        violations += int(np.sum(bad))
        if np.any(bad) and not witness:
            witness = {"lambdas": lam[np.argmax(bad)]}
        worst = min(worst, float(np.min(slack)))
    return VerificationReport("trace-lemma", PASS if violations == 0 else FAIL, lhs=worst,
                              rhs=0.0, slack=worst, tolerance=0.0, relation=">=",
                              witness=witness or {"seed": seed},
                              details={"count": count, "violations": violations,
                                       "n_range": list(n_range)})


# ---------------------------------------------------------------- quasi-negative form

def quasi_negative_inequality_check(pair: MetricPair, kappa_fn: Callable[[ChartPoint], float],
                                    eps: float, h: float = DEFAULT_STEP,
                                    tol: float = LEMMA_TOL) -> VerificationReport:
    """``tr_{omega_eps} i d dbar T >= ((n+1) kappa(x)/(2n) + eps/n) e^T - 1``.

    ``pair.prime`` plays ``omega_eps``; the hypothesis is
    ``rho(omega_eps) >= -omega_eps + eps omega`` in Ricci coefficients,
    i.e. the assembled inequality with ``lambda = 1/2pi`` and ``mu = eps/2pi``.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    n = pair.n
    kappa = float(kappa_fn(pair.point))
    M = (n + 1) * kappa / (2 * n)
    witness = {"point": pair.point.coords, "eps": eps, "kappa": kappa}
    margin = ricci_hypothesis_margin(pair, 1.0 / TWO_PI, eps / TWO_PI)
    if margin < -tol:
        return skipped("quasi-negative-diffineq", "Ric(omega_eps) >= -omega_eps + eps omega fails",
                       witness=witness, margin=margin)
    terms = schwarz_terms(pair)
    lhs = terms.laplacian_log_S
    eT = terms.S
    rhs = (M + eps / n) * eT - 1.0
    weaker = M * eT - 1.0
    rep = compare("quasi-negative-diffineq", lhs, rhs, ">=", tol * max(1.0, abs(rhs)),
                  witness=witness, M=M, T=float(np.log(eT)), weaker_rhs=weaker,
                  minoration_holds=bool(rhs >= weaker), hypothesis_margin=margin)
    lhs_fd = trace_laplacian_fd(pair, lambda pts: np.log(trace_values(pair, pts)), h)
    fd_tol = max(FD_FLOOR, 100 * h * h) * max(1.0, abs(lhs))
    rep.details.update(fd_value=lhs_fd, fd_tolerance=fd_tol)
    if abs(lhs_fd - lhs) > fd_tol or rhs < weaker:
        rep.status = FAIL
    return rep
