"""Random and model curvature-type tensors in a unitary frame."""
from __future__ import annotations

import numpy as np

from .curvature import CurvatureTensor


def kahler_symmetrize(T: np.ndarray) -> np.ndarray:
    """Project onto tensors with the full Kahler symmetry group.

    The swaps ``j <-> l`` and ``k <-> m`` generate a normal Klein subgroup;
    averaging over it and then over the conjugate transpose
    ``(j,k,l,m) -> conj(k,j,m,l)`` averages over the whole group of order 8.
    """
    T = np.asarray(T, dtype=complex)
    K = 0.25 * (T + T.transpose(2, 1, 0, 3) + T.transpose(0, 3, 2, 1) + T.transpose(2, 3, 0, 1))
    return 0.5 * (K + np.conj(K.transpose(1, 0, 3, 2)))


def space_form(n: int, k: float) -> np.ndarray:
    """Constant holomorphic sectional curvature ``k``: ``(k/2)(d_jk d_lm + d_jm d_lk)``."""
    eye = np.eye(n)
    return 0.5 * k * (np.einsum("jk,lm->jklm", eye, eye) + np.einsum("jm,lk->jklm", eye, eye))


def random_kahler_tensor(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    shape = (n, n, n, n)
    G = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return scale * kahler_symmetrize(G)


def random_negative_tensor(rng: np.random.Generator, n: int, noise: float = 0.3,
                           curvature: float = -1.0) -> np.ndarray:
    """Space form of curvature ``curvature`` plus a symmetric Gaussian perturbation."""
    return space_form(n, curvature) + random_kahler_tensor(rng, n, scale=noise)


def as_tensor(coeffs: np.ndarray, gram: np.ndarray | None = None) -> CurvatureTensor:
    n = coeffs.shape[0]
    return CurvatureTensor(coeffs=coeffs, frame_gram=np.eye(n) if gram is None else gram)


def sphere_samples(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    """Uniform points of the unit sphere of C^n (normalised complex Gaussians)."""
    V = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
    return V / np.linalg.norm(V, axis=1, keepdims=True)
