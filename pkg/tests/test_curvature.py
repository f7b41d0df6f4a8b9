from functools import cache

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerlab.curvature import (TWO_PI, change_frame, chern_curvature, hbc, hsc, hsc_batch,
                                 hsc_sign_check, kahler_symmetry_defect, ricci_and_scalar,
                                 ricci_batch, ricci_logdet_check, unitary_frame)
from kahlerlab.errors import ZeroVector
from kahlerlab.geometry import build_model, evaluate_jet, get_model, model_catalog, random_points
from kahlerlab.cli.suites import CATALOG_PARAMS
from kahlerlab.tensors import sphere_samples

cvec = st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=2).filter(lambda v: max(abs(c) for c in v) > 1e-3)


def _tensor(name, p, **params):
    return chern_curvature(evaluate_jet(build_model(name, **params), p))


@cache
def _fs_tensor():
    return _tensor("fubini-study-chart", (0.3, -0.4j), n=2)


@cache
def _torus_tensor():
    return _tensor("perturbed-torus", (0.1 + 0.3j, 0.7 - 0.2j), n=2, coupling=0.3, amplitude=0.3)


def test_disc_curvature_matches_sympy_formula():
    # HSC of h|dz|^2 on a curve is -(d dbar log h) / h
    z, zb = sp.symbols("z zb")
    h = 2 / (1 - z * zb) ** 2
    k = sp.simplify(-sp.diff(sp.log(h), z, zb) / h)
    assert k == -1
    t = _tensor("poincare-disc", [0.5 - 0.2j], scale=2.0)
    assert hsc(t, [1.0]) == pytest.approx(-1.0, abs=1e-13)


@pytest.mark.parametrize("name,params,expected", [
    ("poincare-disc", {}, -2.0), ("fubini-study-chart", {"n": 2}, 2.0),
    ("complex-ball", {"n": 3}, -2.0), ("fubini-study-chart", {"scale": 4.0}, 0.5)])
def test_constant_hsc_models(name, params, expected, rng):
    metric = build_model(name, **params)
    assert get_model(name).curvature_constant(**params) == expected
    for p in random_points(metric, rng, 5):
        t = chern_curvature(evaluate_jet(metric, p))
        vals = hsc_batch(t, sphere_samples(rng, metric.n, 50))
        assert np.allclose(vals, expected, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(v=cvec, w=cvec)
def test_fubini_study_bisectional_range(v, w):
    val = hbc(_fs_tensor(), v, w)
    assert 1.0 - 1e-9 <= val <= 2.0 + 1e-9


@settings(max_examples=40, deadline=None)
@given(v=cvec, c=st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False,
                                    allow_infinity=False))
def test_hsc_is_scale_invariant_and_frame_invariant(v, c):
    t = _torus_tensor()
    v = np.asarray(v)
    assert hsc(t, c * v) == pytest.approx(hsc(t, v), rel=1e-9, abs=1e-12)
    L = np.array([[1.0, 0.5j], [0.2, 2.0]])
    # vector components transform with L^-1
    moved = change_frame(t, L)
    assert hsc(moved, np.linalg.solve(L, v)) == pytest.approx(hsc(t, v), rel=1e-9, abs=1e-12)


def test_ball_is_einstein():
    for n in (1, 2, 3):
        p = np.full(n, 0.2 + 0.1j)
        jet = evaluate_jet(build_model("complex-ball", n=n), p)
        ric = ricci_and_scalar(chern_curvature(jet))
        assert np.allclose(ric.ricci, -(n + 1) * jet.value, atol=1e-12)
        assert ric.scalar == pytest.approx(-n * (n + 1) / TWO_PI, rel=1e-12)


def test_disc_ricci_form_is_minus_omega_over_pi():
    jet = evaluate_jet(build_model("poincare-disc"), [0.6j])
    ric = ricci_and_scalar(chern_curvature(jet))
    assert ric.form[0, 0].real == pytest.approx(-jet.value[0, 0].real / np.pi, rel=1e-13)


@pytest.mark.parametrize("model", model_catalog(), ids=lambda m: m.name)
def test_kahler_symmetries_and_logdet_ricci(model, rng):
    metric = model.build(**CATALOG_PARAMS[model.name])
    for p in random_points(metric, rng, 4):
        t = chern_curvature(evaluate_jet(metric, p))
        assert kahler_symmetry_defect(t) < 1e-10
        if model.name != "flat":
            assert ricci_logdet_check(metric, p).passed


@pytest.mark.parametrize("model", model_catalog(), ids=lambda m: m.name)
def test_sign_catalogue(model, rng):
    metric = model.build(**CATALOG_PARAMS[model.name])
    assert hsc_sign_check(model, metric, random_points(metric, rng, 4), rng).passed


def test_product_has_flat_direction():
    t = _tensor("product", [0.3, 0.5j])
    assert hsc(t, [1.0, 0.0]) == pytest.approx(0.0, abs=1e-14)
    assert hsc(t, [0.0, 1.0]) == pytest.approx(-2.0, abs=1e-12)


def test_ricci_batch_matches_pointwise(rng):
    metric = build_model("perturbed-torus", n=2, coupling=0.2)
    pts = random_points(metric, rng, 6)
    batch = ricci_batch(metric.jets(pts))
    for p, rho in zip(pts, batch):
        single = ricci_and_scalar(chern_curvature(evaluate_jet(metric, p))).ricci
        assert np.allclose(rho, single, atol=1e-11)


def test_unitary_frame_preserves_scalar_and_hsc(rng):
    t = _tensor("complex-ball", [0.3, 0.1j], n=2)
    u = unitary_frame(t)
    assert u.is_unitary()
    assert ricci_and_scalar(u).scalar == pytest.approx(ricci_and_scalar(t).scalar, rel=1e-12)


def test_zero_vector_raises():
    t = _tensor("poincare-disc", [0.0])
    with pytest.raises(ZeroVector):
        hsc(t, [0.0])
    val, residue = hsc(t, [1.0], return_residue=True)
    assert abs(residue) < 1e-12
