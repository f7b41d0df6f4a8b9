import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerlab import hyperbolicity as hy
from kahlerlab.errors import PointOutsideDomain
from kahlerlab.geometry import build_model

disc = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0, 0.97), st.floats(0, 6.3))
DISC = build_model("poincare-disc")
BALL = build_model("complex-ball")


@pytest.mark.parametrize("kappa", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("genus", [0, 1])
def test_rational_and_elliptic_curves_are_obstructed(genus, kappa):
    rep = hy.demailly_bound(hy.CurveData(genus, 1.0), kappa)
    assert rep.details["verdict"] == hy.OBSTRUCTED and rep.failed


def test_high_genus_curve_is_consistent():
    rep = hy.demailly_bound(hy.CurveData(3, 2.0), 1.0)
    assert rep.details["verdict"] == hy.CONSISTENT and rep.passed
    assert rep.slack == pytest.approx(4 - 1.0 / np.pi)


def test_cusp_multiplicity_can_obstruct():
    assert hy.demailly_bound(hy.CurveData(2, 1.0, (4,)), 0.0).details["verdict"] == hy.OBSTRUCTED
    assert hy.demailly_bound(hy.CurveData(2, 1.0, (3,)), 0.0).details["verdict"] == hy.CONSISTENT


def test_curve_validation():
    for bad in ((-1, 1.0), (1, 0.0)):
        with pytest.raises(ValueError):
            hy.CurveData(*bad)
    with pytest.raises(ValueError):
        hy.CurveData(2, 1.0, (1,))
    with pytest.raises(ValueError):
        hy.demailly_bound(hy.CurveData(2, 1.0), -1.0)


def test_genus_formulas():
    assert [hy.pluecker_genus(d) for d in range(1, 7)] == [0, 0, 1, 3, 6, 10]
    assert hy.hurwitz_tangent_degree(0) == 2 and hy.hurwitz_tangent_degree(3) == -4
    with pytest.raises(ValueError):
        hy.pluecker_genus(0)


def test_surface_example():
    rep = hy.validate_surface_example(hy.SurfaceExampleParams(2, 4, 5, 4))
    assert rep.passed
    assert rep.details["fibre_genera"] == {"smooth": 3, "special": 2, "one-node": 2}


@pytest.mark.parametrize("params,broken", [
    ((1, 4, 5, 4), "g >= 2"), ((2, 5, 4, 4), "0 < a < b"), ((2, 4, 6, 4), "gcd(a, b) = 1"),
    ((2, 3, 5, 4), "a >= 2g"), ((2, 4, 5, 3), "d >= 4")])
def test_surface_example_rejects_each_violation(params, broken):
    rep = hy.validate_surface_example(hy.SurfaceExampleParams(*params))
    assert rep.failed
    assert rep.details["constraints"][broken] == "fail"


@settings(max_examples=200, deadline=None)
@given(z=disc, w=disc, x=disc)
def test_distance_is_a_metric(z, w, x):
    d = hy.poincare_distance
    assert d(z, x) <= d(z, w) + d(w, x) + 1e-12
    assert d(z, w) == pytest.approx(d(w, z), abs=1e-12)
    assert d(z, z) == 0.0


@settings(max_examples=100, deadline=None)
@given(z=disc, w=disc, a=disc, theta=st.floats(0, 6.3))
def test_mobius_isometry_and_contraction(z, w, a, theta):
    m = hy.mobius(a * 0.9, theta)
    assert hy.poincare_distance(m(z), m(w)) == pytest.approx(hy.poincare_distance(z, w),
                                                             rel=1e-7, abs=1e-9)
    assert hy.poincare_distance(z ** 2, w ** 2) <= hy.poincare_distance(z, w) + 1e-12


def test_distance_domain_errors():
    with pytest.raises(PointOutsideDomain):
        hy.poincare_distance(1.0, 0.0)
    with pytest.raises(PointOutsideDomain):
        hy.mobius(1.2)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), eps=st.sampled_from([0.0, 1e-3, 0.1]))
def test_disc_maps_into_disc_meet_lower_bound_with_equality(seed, eps):
    rng = np.random.default_rng(seed)
    c = 0.2 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    t = 0.3 * (rng.random() + 1j * rng.random())
    rep = hy.subharmonicity_defect(DISC, hy.DiscMap(c), t, 2.0, eps)
    assert rep.passed and rep.lhs > 0
    assert rep.details["equality_defect"] <= 1e-6


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_ball_maps_are_strictly_subharmonic(seed):
    rng = np.random.default_rng(seed)
    c = 0.15 * (rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
    rep = hy.subharmonicity_defect(BALL, hy.DiscMap(c), 0.2, 2.0, 0.0)
    assert rep.passed and rep.lhs > 0


def test_identity_map_on_disc():
    # psi = log |f'|^2_omega = -2 log(1 - |t|^2); d dbar psi = 2 / (1 - |t|^2)^2 = 2 N
    rep = hy.subharmonicity_defect(DISC, hy.DiscMap([0, 1]), 0.5, 2.0)
    assert rep.lhs == pytest.approx(2 / 0.75 ** 2, rel=1e-12)


def test_flat_target_gives_harmonic_log():
    rep = hy.subharmonicity_defect(build_model("flat"), hy.DiscMap([0, 1, 0.5]), 0.1, 0.0)
    assert rep.passed and abs(rep.lhs) < 1e-12


def test_critical_point_requires_regularisation():
    with pytest.raises(ValueError):
        hy.subharmonicity_defect(DISC, hy.DiscMap([0, 0, 1]), 0.0, 2.0)
    assert hy.subharmonicity_defect(DISC, hy.DiscMap([0, 0, 1]), 0.0, 2.0, 1e-3).passed
    with pytest.raises(PointOutsideDomain):
        hy.DiscMap([0, 1], radius=0.5).derivatives(0.7)


def test_derivatives_of_polynomial_map():
    f = hy.DiscMap([1, 2, 3])
    v, d1, d2 = f.derivatives(2.0)
    assert v[0] == 17 and d1[0] == 14 and d2[0] == 6
