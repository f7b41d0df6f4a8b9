"""Sphere averages of bisectional and sectional curvature.

Averages are taken against the probability measure on the unit sphere of
C^n. In a unitary frame the Ricci form ``(i/2pi) rho`` and the scalar
curvature satisfy

    avg_w HBC(v, w) = rho(v, vbar) / (n |v|^2)
    avg_v HSC(v)    = 4 pi scal / (n (n + 1))

Exact mode expands both integrands into monomials and integrates them with
:func:`sphere_moment`; Monte Carlo mode is a diagnostic cross-check.
"""
from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .curvature import TWO_PI, CurvatureTensor, hsc_batch, norm2, ricci_and_scalar
from .errors import NonUnitaryFrame, UnsupportedDegree, ZeroVector
from .report import compare, skipped
from .tensors import sphere_samples

EXACT = "exact"
MONTE_CARLO = "monte-carlo"

IDENTITY_TOL = 1e-10
MC_SIGMAS = 4.0


@dataclass(frozen=True)
class SphereMomentTable:
    n: int
    second_moment: Fraction
    fourth_diagonal: Fraction
    fourth_mixed: Fraction

    @classmethod
    def build(cls, n: int) -> "SphereMomentTable":
        return cls(n, sphere_moment(n, (0,), (0,)), sphere_moment(n, (0, 0), (0, 0)),
                   sphere_moment(n, (0, 1), (0, 1)) if n > 1 else Fraction(0))


@dataclass(frozen=True)
class MonteCarloMode:
    samples: int = 1_000_000
    seed: int = 0
    workers: int = 1
    chunk: int = 200_000


def sphere_moment(n: int, holo, antiholo) -> Fraction:
    """``avg v_{i1} ... v_{ip} conj(v_{j1} ... v_{jq})`` over the unit sphere of C^n.

    Only total degree 2 or 4 is supported; unbalanced monomials vanish by
    circle invariance in each coordinate.
    """
    holo, antiholo = tuple(holo), tuple(antiholo)
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if len(holo) + len(antiholo) not in (2, 4):
        raise UnsupportedDegree(f"degree {len(holo) + len(antiholo)} moments are not supported")
    if any(not 0 <= i < n for i in holo + antiholo):
        raise IndexError("monomial index out of range")
    a, b = Counter(holo), Counter(antiholo)
    if a != b:
        return Fraction(0)
    total = sum(a.values())
    num = factorial(n - 1)
    for k in a.values():
        num *= factorial(k)
    return Fraction(num, factorial(n - 1 + total))


def sphere_moment_mc(n: int, holo, antiholo, mode: MonteCarloMode) -> tuple[float, float]:
    """Monte Carlo estimate and standard error of the real part of a sphere moment."""
    holo, antiholo = list(holo), list(antiholo)

    def kernel(V):
        vals = np.prod(V[:, holo], axis=1) * np.prod(V[:, antiholo].conj(), axis=1)
        return np.real(vals)

    return _mc_mean(kernel, n, mode)


def _require_unitary(tensor: CurvatureTensor, tol: float = 1e-10):
    if not tensor.is_unitary(tol):
        raise NonUnitaryFrame("sphere averages need a unitary frame; orthonormalize first")


def _monomial_average_hbc(R: np.ndarray, v: np.ndarray) -> complex:
    n = R.shape[0]
    M = np.einsum("jklm,j,k->lm", R, v, v.conj())
    total = 0j
    for l, m in itertools.product(range(n), repeat=2):
        mom = sphere_moment(n, (l,), (m,))
        if mom:
            total += M[l, m] * float(mom)
    return total


def _monomial_average_hsc(R: np.ndarray) -> complex:
    n = R.shape[0]
    total = 0j
    for j, k, l, m in itertools.product(range(n), repeat=4):
        mom = sphere_moment(n, (j, l), (k, m))
        if mom:
            total += R[j, k, l, m] * float(mom)
    return total


def _chunks(total: int, size: int):
    while total > 0:
        take = min(size, total)
        yield take
        total -= take


def _mc_mean(kernel, n: int, mode: MonteCarloMode) -> tuple[float, float]:
    """Mean and standard error of ``kernel(samples)`` with per-worker seeded generators."""
    children = np.random.SeedSequence(mode.seed).spawn(mode.workers)
    share = [mode.samples // mode.workers + (i < mode.samples % mode.workers)
             for i in range(mode.workers)]

    def run(i):
        rng = np.random.default_rng(children[i])
        s = s2 = 0.0
        for take in _chunks(share[i], mode.chunk):
            vals = kernel(sphere_samples(rng, n, take))
            s += float(np.sum(vals))
            s2 += float(np.sum(vals * vals))
        return s, s2

    if mode.workers > 1:
        with ThreadPoolExecutor(mode.workers) as pool:
            parts = list(pool.map(run, range(mode.workers)))
    else:
        parts = [run(0)]
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    N = mode.samples
    mean = s / N
    var = max(s2 / N - mean * mean, 0.0) * N / max(N - 1, 1)
    return mean, float(np.sqrt(var / N))


def average_hbc_identity(tensor: CurvatureTensor, v, mode=EXACT):
    """Compare the sphere average of ``HBC(v, .)`` with the Ricci side."""
    _require_unitary(tensor)
    n = tensor.n
    v = np.asarray(v, dtype=complex).reshape(n)
    nv = norm2(tensor.frame_gram, v)
    if nv == 0.0:
        raise ZeroVector("direction vector is zero")
    ric = ricci_and_scalar(tensor)
    # Ric(v, vbar) for the form (i/2pi) sum rho dz ^ dzbar, times -2 pi i / (n |v|^2)
    ric_vv = (1j / TWO_PI) * (v @ ric.ricci @ v.conj())
    rhs = complex(-TWO_PI * 1j * ric_vv / (n * nv))
    witness = {"v": v, "n": n}
    if mode == EXACT:
        lhs = _monomial_average_hbc(tensor.coeffs, v) / nv
        return compare("average-hbc-ricci", lhs.real, rhs.real, "==", IDENTITY_TOL,
                       witness=witness, mode=EXACT, imag_residue=abs(lhs.imag) + abs(rhs.imag))
    M = np.einsum("jklm,j,k->lm", tensor.coeffs, v, v.conj()) / nv

    def kernel(W):
        return np.real(np.einsum("sl,lm,sm->s", W, M, W.conj()))

    mean, se = _mc_mean(kernel, n, mode)
    return compare("average-hbc-ricci", mean, rhs.real, "==", max(MC_SIGMAS * se, 1e-12),
                   witness=dict(witness, seed=mode.seed, samples=mode.samples),
                   mode=MONTE_CARLO, standard_error=se)


def average_hsc_identity(tensor: CurvatureTensor, mode=EXACT):
    """Compare the sphere average of HSC with ``4 pi scal / (n (n + 1))``."""
    _require_unitary(tensor)
    n = tensor.n
    scal = ricci_and_scalar(tensor).scalar
    rhs = 2.0 * TWO_PI * scal / (n * (n + 1))
    if mode == EXACT:
        lhs = _monomial_average_hsc(tensor.coeffs)
        return compare("average-hsc-scalar", lhs.real, rhs, "==", IDENTITY_TOL,
                       witness={"n": n}, mode=EXACT, scalar=scal, imag_residue=abs(lhs.imag))
    mean, se = _mc_mean(lambda V: hsc_batch(tensor, V), n, mode)
    return compare("average-hsc-scalar", mean, rhs, "==", max(MC_SIGMAS * se, 1e-12),
                   witness={"n": n, "seed": mode.seed, "samples": mode.samples},
                   mode=MONTE_CARLO, standard_error=se, scalar=scal)


def sign_propagation_check(tensor: CurvatureTensor, rng: np.random.Generator,
                           samples: int = 2000, strict: float = -0.1):
    """Non-positive sampled HSC with one value below ``strict`` must give scal < 0."""
    _require_unitary(tensor)
    vals = hsc_batch(tensor, sphere_samples(rng, tensor.n, samples))
    if np.max(vals) > 0 or np.min(vals) >= strict:
        return skipped("average-sign-propagation", "sampled HSC is not non-positive with a "
                       "strictly negative direction", max_hsc=float(np.max(vals)))
    scal = ricci_and_scalar(tensor).scalar
    return compare("average-sign-propagation", scal, 0.0, "<=", 0.0,
                   witness={"n": tensor.n}, max_hsc=float(np.max(vals)),
                   min_hsc=float(np.min(vals)))
