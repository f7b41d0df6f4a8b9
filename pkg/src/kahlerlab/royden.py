"""Royden's polarization lemma for bi-hermitian forms with an HSC bound."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidFrame
from .report import FAIL, VerificationReport, combine, compare
from .tensors import random_kahler_tensor, space_form, sphere_samples

MAX_NU = 8
ORTHO_TOL = 1e-10
POLARIZATION_TOL = 1e-9
BOUND_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BiHermitianForm:
    """``Theta(a, b, c, d) = sum R_{jklm} a_j conj(b_k) c_l conj(d_m)`` with a gram matrix."""

    coeffs: np.ndarray
    gram: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", c)
        g = np.eye(c.shape[0]) if self.gram is None else np.asarray(self.gram, dtype=complex)
        object.__setattr__(self, "gram", g)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def __call__(self, a, b, c, d) -> complex:
        return complex(np.einsum("jklm,j,k,l,m->", self.coeffs, a, np.conj(b), c, np.conj(d)))

    def inner(self, a, b) -> complex:
        return complex(np.asarray(a) @ self.gram @ np.conj(b))

    def norm2(self, a) -> float:
        return self.inner(a, a).real

    def quartic(self, V: np.ndarray) -> np.ndarray:
        """``Theta(v, v, v, v)`` for the rows of ``V``."""
        Vc = V.conj()
        return np.real(np.einsum("jklm,sj,sk,sl,sm->s", self.coeffs, V, Vc, V, Vc, optimize=True))

    def sectional(self, V: np.ndarray) -> np.ndarray:
        den = np.real(np.einsum("sl,lm,sm->s", V, self.gram, V.conj())) ** 2
        return self.quartic(V) / den


@dataclass(frozen=True, eq=False)
class FrameSpec:
    """Mutually orthogonal nonzero vectors (rows of ``vectors``)."""

    vectors: np.ndarray

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        object.__setattr__(self, "vectors", V)

    @property
    def nu(self) -> int:
        return self.vectors.shape[0]

    def validate(self, form: BiHermitianForm, tol: float = ORTHO_TOL) -> None:
        V = self.vectors
        if V.shape[1] != form.n:
            raise InvalidFrame("frame vectors do not match the form dimension")
        if not 1 <= self.nu <= min(form.n, MAX_NU):
            raise InvalidFrame(f"frame size {self.nu} must lie in [1, min(n, {MAX_NU})]")
        G = V @ form.gram @ V.conj().T
        if np.any(np.real(np.diag(G)) <= 0):
            raise InvalidFrame("frame contains a zero vector")
        off = np.abs(G - np.diag(np.diag(G)))
        if np.max(off, initial=0.0) > tol:
            raise InvalidFrame(f"frame is not orthogonal (max inner product {np.max(off):.3g})")


def polarization_sum(form: BiHermitianForm, frame: FrameSpec) -> tuple[float, float]:
    """Full ``4^nu`` root-of-unity average and the reduced diagonal/paired sum."""
    frame.validate(form)
    V = frame.vectors
    nu = frame.nu
    roots = np.array([1, 1j, -1, -1j])
    signs = np.array(list(itertools.product(roots, repeat=nu)))
    full = float(np.sum(form.quartic(signs @ V))) / 4 ** nu
    T = np.einsum("jklm,aj,bk,cl,dm->abcd", form.coeffs, V, V.conj(), V, V.conj(), optimize=True)
    diag = np.einsum("aaaa->a", T)
    pairs = np.einsum("aacc->ac", T) + np.einsum("acca->ac", T)
    reduced = np.real(np.sum(diag) + np.sum(pairs) - np.trace(pairs))
    return full, float(reduced)


def _project_unit(v, gram):
    return v / np.sqrt(np.real(v @ gram @ v.conj()))


def hsc_upper_bound(form: BiHermitianForm, samples: int = 2000, steps: int = 50,
                    rng: np.random.Generator | None = None, starts: int = 8) -> float:
    """Empirical sup of ``Theta(v,v,v,v)/|v|^4``: sphere samples plus projected ascent.

    This is a lower estimate of the true supremum.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    L = np.linalg.cholesky(form.gram.T)
    # e_a = sum L^-H columns: unitary coordinates for the gram
    U = np.linalg.inv(L).conj().T
    V = sphere_samples(rng, form.n, samples) @ U.T
    vals = form.sectional(V)
    best = float(np.max(vals))
    R = form.coeffs
    for idx in np.argsort(vals)[::-1][:starts]:
        v = _project_unit(V[idx], form.gram)
        step = 0.2
        cur = float(form.sectional(v[None])[0])
        for _ in range(steps):
            # gradient of Theta(v,v,v,v) with respect to conj(v)
            grad = (np.einsum("jklm,j,l,m->k", R, v, v, v.conj())
                    + np.einsum("jklm,j,k,l->m", R, v, v.conj(), v))
            cand = _project_unit(v + step * np.linalg.solve(form.gram.T, grad), form.gram)
            val = float(form.sectional(cand[None])[0])
            if val > cur:
                v, cur = cand, val
                step *= 1.5
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        best = max(best, cur)
    return best


def royden_bounds(K: float, norms2: np.ndarray) -> tuple[float, float]:
    nu = norms2.size
    s = float(np.sum(norms2))
    general = 0.5 * K * (s * s + float(np.sum(norms2 ** 2)))
    nonpositive = (nu + 1) / (2 * nu) * K * s * s
    return general, nonpositive


def royden_inequality_check(form: BiHermitianForm, frame: FrameSpec, K: float,
                            tol: float = BOUND_TOL) -> VerificationReport:
    """LHS ``sum_{a,b} Theta(xi_a, xi_a, xi_b, xi_b)`` against both bounds."""
    frame.validate(form)
    V = frame.vectors
    norms2 = np.real(np.einsum("al,lm,am->a", V, form.gram, V.conj()))
    lhs = float(np.real(np.einsum("jklm,aj,ak,bl,bm->", form.coeffs, V, V.conj(), V, V.conj(),
                                  optimize=True)))
    general, nonpositive = royden_bounds(K, norms2)
    # the hypothesis restricted to the frame vectors themselves
    hyp = float(np.max(form.quartic(V) - K * norms2 ** 2))
    witness = {"K": K, "frame": V}
    # tolerances are relative: the bounds scale with the fourth power of the frame
    reports = [compare("royden-general-bound", lhs, general, "<=", tol * max(1.0, abs(general)),
                       witness=witness)]
    if K <= 0:
        reports.append(compare("royden-nonpositive-bound", lhs, nonpositive, "<=",
                               tol * max(1.0, abs(nonpositive)), witness=witness))
    out = combine("royden-inequality", reports, witness=witness, hypothesis_excess=hyp)
    out.lhs, out.rhs = lhs, min(general, nonpositive) if K <= 0 else general
    out.slack = out.lhs - out.rhs
    out.relation = "<="
    out.tolerance = tol * max(1.0, abs(out.rhs))
    out.details.update(general_bound=general, nonpositive_bound=nonpositive if K <= 0 else None,
                       sub_reports=[r.to_record() for r in reports])
    return out


def random_orthogonal_frame(rng: np.random.Generator, n: int, nu: int,
                            gram: np.ndarray | None = None, scale_range=(0.2, 3.0)) -> FrameSpec:
    """``nu`` orthogonal vectors with random complex scalings."""
    gram = np.eye(n) if gram is None else gram
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(Z)
    U = np.linalg.inv(np.linalg.cholesky(np.asarray(gram).T)).conj().T
    cols = (U @ Q)[:, :nu].T
    scales = rng.uniform(*scale_range, nu) * np.exp(2j * np.pi * rng.random(nu))
    return FrameSpec(cols * scales[:, None])


@dataclass
class SweepResult:
    trials: int
    violations: int
    retightened: int
    max_polarization_defect: float
    worst_slack: float
    witnesses: list

    def report(self) -> VerificationReport:
        ok = self.violations == 0 and self.max_polarization_defect <= POLARIZATION_TOL
        witness = {"violations": self.witnesses[:5]} if not ok else {}
        return VerificationReport(
            claim_id="royden-nonpositive-bound", status="pass" if ok else FAIL,
            lhs=self.worst_slack, rhs=0.0, slack=self.worst_slack, tolerance=BOUND_TOL,
            relation="<=", witness=witness or {"note": "randomized sweep"},
            details={"trials": self.trials, "violations": self.violations,
                     "retightened": self.retightened,
                     "max_polarization_defect": self.max_polarization_defect})


def royden_sweep(trials: int = 1000, seed: int = 0, n_range=(1, 4), max_nu: int = 4,
                 samples: int = 400, steps: int = 30, noise: float = 0.35) -> SweepResult:
    """Randomized check over forms with empirically negative K and random frames.

    A violation is recounted only after K is re-estimated with a larger budget.
    """
    root = np.random.SeedSequence(seed)
    violations = retight = 0
    max_pol = 0.0
    worst = -np.inf
    witnesses = []
    for t, child in enumerate(root.spawn(trials)):
        rng = np.random.default_rng(child)
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        nu = int(rng.integers(1, min(n, max_nu) + 1))
        while True:
            R = space_form(n, -1.0) + random_kahler_tensor(rng, n, noise)
            form = BiHermitianForm(R)
            K = hsc_upper_bound(form, samples=samples, steps=steps, rng=rng, starts=3)
            if K < 0:
                break
        frame = random_orthogonal_frame(rng, n, nu)
        full, reduced = polarization_sum(form, frame)
        max_pol = max(max_pol, abs(full - reduced) / max(1.0, abs(full)))
        rep = royden_inequality_check(form, frame, K)
        if rep.failed:
            retight += 1
            K = max(K, hsc_upper_bound(form, samples=20 * samples, steps=200, rng=rng, starts=20))
            rep = royden_inequality_check(form, frame, K)
        worst = max(worst, rep.slack)
        if rep.failed:
            violations += 1
            witnesses.append({"trial": t, "n": n, "nu": nu, "K": K, "slack": rep.slack})
    return SweepResult(trials, violations, retight, max_pol, float(worst), witnesses)
