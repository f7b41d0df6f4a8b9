import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerlab import royden as ry
from kahlerlab.errors import InvalidFrame
from kahlerlab.tensors import random_kahler_tensor, space_form

seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n=st.integers(1, 4))
def test_polarization_identity(seed, n):
    rng = np.random.default_rng(seed)
    nu = int(rng.integers(1, n + 1))
    form = ry.BiHermitianForm(random_kahler_tensor(rng, n))
    full, reduced = ry.polarization_sum(form, ry.random_orthogonal_frame(rng, n, nu))
    assert abs(full - reduced) <= 1e-9 * max(1.0, abs(full))


def test_polarization_with_non_identity_gram(rng):
    n = 3
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    gram = A @ A.conj().T + np.eye(n)
    form = ry.BiHermitianForm(random_kahler_tensor(rng, n), gram)
    frame = ry.random_orthogonal_frame(rng, n, 3, gram)
    full, reduced = ry.polarization_sum(form, frame)
    assert full == pytest.approx(reduced, rel=1e-9)


def test_space_form_example_is_sharp():
    form = ry.BiHermitianForm(space_form(2, -1.0))
    rep = ry.royden_inequality_check(form, ry.FrameSpec(np.eye(2)), -1.0)
    assert rep.passed
    assert rep.lhs == pytest.approx(-3.0)
    assert rep.details["general_bound"] == pytest.approx(-3.0)
    assert rep.details["nonpositive_bound"] == pytest.approx(-3.0)
    full, _ = ry.polarization_sum(form, ry.FrameSpec(np.eye(2)))
    assert full == pytest.approx(-4.0)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(1, 4), K=st.floats(-3, -0.01))
def test_single_vector_reduces_to_hypothesis(seed, n, K):
    rng = np.random.default_rng(seed)
    v = ry.random_orthogonal_frame(rng, n, 1).vectors[0]
    s = float(np.real(np.vdot(v, v)))
    general, nonpositive = ry.royden_bounds(K, np.array([s]))
    assert general == pytest.approx(K * s * s) and nonpositive == pytest.approx(K * s * s)


def test_hsc_upper_bound_on_known_forms(rng):
    assert ry.hsc_upper_bound(ry.BiHermitianForm(space_form(3, -1.0)), rng=rng) == pytest.approx(
        -1.0, abs=1e-9)
    assert ry.hsc_upper_bound(ry.BiHermitianForm(space_form(2, 2.0)), rng=rng) == pytest.approx(
        2.0, abs=1e-9)


def test_hsc_upper_bound_never_exceeds_true_maximum(rng):
    form = ry.BiHermitianForm(space_form(1, -1.0) + random_kahler_tensor(rng, 1, 0.3))
    # n = 1: the sectional value is the single coefficient
    assert ry.hsc_upper_bound(form, rng=rng) == pytest.approx(form.coeffs[0, 0, 0, 0].real)


def test_invalid_frames():
    form = ry.BiHermitianForm(space_form(2, -1.0))
    with pytest.raises(InvalidFrame):
        ry.FrameSpec([[1.0, 0.0], [1.0, 1.0]]).validate(form)
    with pytest.raises(InvalidFrame):
        ry.FrameSpec([[1.0, 0.0], [0.0, 0.0]]).validate(form)
    with pytest.raises(InvalidFrame):
        ry.FrameSpec([[1.0, 0.0, 0.0]]).validate(form)
    with pytest.raises(InvalidFrame):
        ry.FrameSpec(np.eye(2)[:0]).validate(form)


def test_small_sweep_has_no_violations():
    res = ry.royden_sweep(trials=40, seed=11)
    assert res.violations == 0 and res.report().passed
    assert res.max_polarization_defect <= 1e-9


def test_sweep_is_deterministic():
    a = ry.royden_sweep(trials=10, seed=3).report().to_json()
    b = ry.royden_sweep(trials=10, seed=3).report().to_json()
    assert a == b


def test_positive_curvature_uses_general_bound_only(rng):
    form = ry.BiHermitianForm(space_form(3, 2.0))
    rep = ry.royden_inequality_check(form, ry.random_orthogonal_frame(rng, 3, 2), 2.0)
    assert rep.passed and rep.details["nonpositive_bound"] is None
