from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerlab import averages as av
from kahlerlab.curvature import chern_curvature, unitary_frame
from kahlerlab.errors import NonUnitaryFrame, UnsupportedDegree
from kahlerlab.geometry import build_model, evaluate_jet
from kahlerlab.report import FAIL, PASS, SKIPPED
from kahlerlab.tensors import (as_tensor, random_kahler_tensor, random_negative_tensor,
                               space_form, sphere_samples)


@pytest.mark.parametrize("n", range(1, 7))
def test_moment_table(n):
    t = av.SphereMomentTable.build(n)
    assert t.second_moment == Fraction(1, n)
    assert t.fourth_diagonal == Fraction(2, n * (n + 1))
    if n > 1:
        assert t.fourth_mixed == Fraction(1, n * (n + 1))
    # |v|^4 = 1 on the sphere
    assert n * t.fourth_diagonal + n * (n - 1) * t.fourth_mixed == 1


def test_unbalanced_monomials_vanish_and_degree_is_checked():
    assert av.sphere_moment(3, (0, 1), (0, 2)) == 0
    assert av.sphere_moment(2, (0,), (1,)) == 0
    with pytest.raises(UnsupportedDegree):
        av.sphere_moment(2, (0, 0, 0), (0, 0, 0))


def test_moment_against_brute_force_monte_carlo():
    rng = np.random.default_rng(5)
    V = sphere_samples(rng, 3, 400_000)
    est = np.mean(np.abs(V[:, 0]) ** 2 * np.abs(V[:, 2]) ** 2)
    se = np.std(np.abs(V[:, 0]) ** 2 * np.abs(V[:, 2]) ** 2) / np.sqrt(V.shape[0])
    assert abs(est - float(av.sphere_moment(3, (0, 2), (0, 2)))) < 4 * se


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 3))
def test_averaging_identities_exact(seed, n):
    rng = np.random.default_rng(seed)
    t = as_tensor(random_kahler_tensor(rng, n))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert av.average_hbc_identity(t, v).passed
    assert av.average_hsc_identity(t).passed


def test_identities_on_model_metrics():
    t = unitary_frame(chern_curvature(evaluate_jet(build_model("complex-ball", n=3),
                                                   [0.1, 0.2j, -0.3])))
    rep = av.average_hsc_identity(t)
    assert rep.passed and rep.lhs == pytest.approx(-2.0, abs=1e-12)
    # ball: avg_w HBC(v, w) = -(n+1)/n
    rep = av.average_hbc_identity(t, [1.0, 1j, 0.5])
    assert rep.passed and rep.lhs == pytest.approx(-4.0 / 3.0, abs=1e-12)


def test_broken_symmetry_breaks_identity(rng):
    R = random_kahler_tensor(rng, 2)
    R[0, 1, 1, 0] += 0.5
    R[1, 0, 0, 1] += 0.5
    assert av.average_hsc_identity(as_tensor(R)).status == FAIL


def test_non_unitary_frame_is_rejected():
    t = chern_curvature(evaluate_jet(build_model("complex-ball"), [0.3, 0.2]))
    with pytest.raises(NonUnitaryFrame):
        av.average_hsc_identity(t)


def test_monte_carlo_mode_within_four_sigma_and_deterministic(rng):
    t = as_tensor(random_kahler_tensor(rng, 2))
    mode = av.MonteCarloMode(samples=200_000, seed=3, workers=2, chunk=50_000)
    a = av.average_hsc_identity(t, mode)
    b = av.average_hsc_identity(t, mode)
    assert a.passed and a.lhs == b.lhs
    assert a.tolerance == pytest.approx(4 * a.details["standard_error"])
    assert av.average_hbc_identity(t, [1.0, 2.0j], mode).passed


def test_sign_propagation(rng):
    for n in (1, 2, 3):
        rep = av.sign_propagation_check(as_tensor(space_form(n, -1.0)), rng)
        assert rep.status == PASS and rep.lhs < 0
    rep = av.sign_propagation_check(as_tensor(space_form(2, 1.0)), rng)
    assert rep.status == SKIPPED
    rep = av.sign_propagation_check(as_tensor(random_negative_tensor(rng, 2, 0.1)), rng)
    assert rep.status == PASS
