import struct

import numpy as np
import pytest

from kahlerlab import torus as tr
from kahlerlab.errors import SolverError


@pytest.fixture(scope="module")
def perturbed():
    prob = tr.assemble_problem("perturbed-torus", {"amplitude": 0.1}, 0.5, 64)
    return prob, tr.solve(prob)


def test_spectral_ddbar_is_exact_on_trig_polynomials():
    g = tr.SpectralGrid(2, 8)
    P = g.points
    x1, y1, x2 = P[..., 0].real, P[..., 0].imag, P[..., 1].real
    f = np.cos(2 * np.pi * x1) + np.sin(2 * np.pi * (y1 + x2))
    H = g.ddbar(f)
    # d dbar = (1/4) Laplacian per axis; mixed term from sin(2 pi (y1 + x2))
    s = np.sin(2 * np.pi * (y1 + x2))
    assert np.allclose(H[..., 0, 0], -np.pi ** 2 * (np.cos(2 * np.pi * x1) + s), atol=1e-11)
    assert np.allclose(H[..., 1, 1], -np.pi ** 2 * s, atol=1e-11)
    # d_1 dbar_2 sin(2 pi (y1 + x2)) = (1/4)(-i d_y1)(d_x2) = i pi^2 sin
    assert np.allclose(H[..., 0, 1], 1j * np.pi ** 2 * s, atol=1e-11)
    assert np.allclose(H[..., 1, 0], np.conj(H[..., 0, 1]), atol=1e-11)


def test_spectral_grid_validation():
    with pytest.raises(ValueError):
        tr.SpectralGrid(1, 12)
    with pytest.raises(ValueError):
        tr.SpectralGrid(0, 16)


@pytest.mark.parametrize("eps", [0.4, 0.2, 0.1])
@pytest.mark.parametrize("n", [1, 2])
def test_flat_background_constant_solution(eps, n):
    prob = tr.assemble_problem("flat", {"n": n} if n > 1 else {}, eps, 16 if n == 1 else 8)
    st = tr.solve(prob, tol=1e-12)
    assert st.residual_norm <= 1e-12
    assert np.max(np.abs(st.u - n * np.log(eps))) <= 1e-10
    assert tr.verify_ke_relation(prob, st).passed


def test_perturbed_solution(perturbed):
    prob, st = perturbed
    assert st.converged and st.residual_norm <= 1e-10 and st.positivity_margin > 0
    assert st.history[0]["iteration"] == 0 and "residual" in st.history[-1]
    assert tr.verify_ke_relation(prob, st).passed
    assert tr.verify_sup_bound(prob, st).passed
    assert tr.elementary_trace_check(prob, st).passed


def test_two_starts_agree(perturbed):
    prob, st = perturbed
    other = tr.solve(prob, u0=np.full(prob.grid.shape, np.log(prob.eps)))
    assert np.max(np.abs(other.u - st.u)) <= 1e-9


def test_density_relation_holds_pointwise(perturbed):
    prob, st = perturbed
    A = prob.matrix(st.u)
    lhs = np.real(np.linalg.det(A))
    rhs = np.exp(st.u) * np.real(np.linalg.det(prob.metric))
    assert np.max(np.abs(lhs - rhs) / rhs) < 1e-9


def test_shifted_solution_violates_sup_bound(perturbed):
    prob, st = perturbed
    C = tr.sup_bound_constant(prob)
    assert tr.verify_sup_bound(prob, st, u=st.u + 2 * abs(C) + 1).failed


def test_bad_initial_guess_raises():
    prob = tr.assemble_problem("perturbed-torus", {"amplitude": 0.4}, 0.05, 16)
    with pytest.raises(SolverError) as info:
        tr.solve(prob, u0=np.zeros(prob.grid.shape) + 40 * np.cos(
            2 * np.pi * prob.grid.points[..., 0].real))
    assert info.value.state is not None


def test_assemble_rejects_bad_input():
    with pytest.raises(ValueError):
        tr.assemble_problem("sphere", {}, 0.1, 16)
    with pytest.raises(ValueError):
        tr.assemble_problem("flat", {}, 0.0, 16)


@pytest.mark.parametrize("background,params,size,n", [
    ("flat", {}, 16, 1), ("perturbed-torus", {"amplitude": 0.1}, 32, 1),
    ("perturbed-torus", {"n": 2, "amplitude": 0.1, "coupling": 0.2}, 8, 2)])
def test_volume_slope_equals_dimension(background, params, size, n):
    base = tr.assemble_problem(background, params, 0.4, size)
    rec = tr.eps_sweep(base, [0.4, 0.2, 0.1, 0.05])
    assert rec.complete
    assert tr.volume_slope_check(rec).passed
    assert rec.slope == pytest.approx(n, rel=0.02)
    assert all(b < a for a, b in zip(rec.integrals, rec.integrals[1:]))


def test_sweep_rejects_unsorted_eps():
    with pytest.raises(ValueError):
        tr.eps_sweep(tr.assemble_problem("flat", {}, 0.1, 8), [0.1, 0.2])


def test_integral_chain_arithmetic():
    assert tr.sup_lower_bound(1, 4.0) == pytest.approx(-np.log(np.pi / 2))
    assert tr.sup_lower_bound(1, 2.0) == pytest.approx(-np.log(np.pi))
    assert tr.integral_chain_check(1, 4.0, 1.0).passed
    assert tr.integral_chain_check(1, 40.0, 3.0).failed
    with pytest.raises(ValueError):
        tr.sup_lower_bound(1, 0.0)


def test_disc_surrogate_saturates_the_chain():
    d = tr.DiscSurrogate()
    assert d.kappa == 2.0
    rep = tr.integral_chain_check(1, d.kappa, float(np.exp(-d.u)), d.u)
    assert rep.passed and rep.slack == pytest.approx(0.0, abs=1e-12)
    assert tr.surrogate_integral_check(d).passed
    assert tr.surrogate_integral_check(tr.DiscSurrogate(3.0)).passed


def test_integral_inequality_measures_c_eps_from_u():
    rep = tr.integral_inequality_check(tr.DiscSurrogate())
    assert rep.passed and rep.details["C_eps"] == pytest.approx(np.pi)
    assert rep.details["sup_lower_bound"] == pytest.approx(-np.log(np.pi))
    # u below the lower bound everywhere inflates C_eps past the chain
    low = tr.integral_inequality_check(tr.DiscSurrogate(), u=np.full(4, -2.0))
    assert low.failed and low.details["C_eps"] == pytest.approx(np.exp(2.0))


def test_dump_round_trip_and_header(tmp_path):
    u = np.random.default_rng(0).standard_normal((8, 8, 8, 8))
    path = tr.dump_solution(tmp_path / "u.bin", u, 2, 0.25)
    raw = path.read_bytes()
    magic, version, n, grid, eps = struct.unpack_from("<4sIIId", raw)
    assert (magic, version, n, grid, eps) == (b"KLMA", 1, 2, 8, 0.25)
    assert len(raw) == struct.calcsize("<4sIIId") + 8 * 8 ** 4
    v, n2, e2 = tr.load_solution(path)
    assert np.array_equal(u, v) and n2 == 2 and e2 == 0.25
    with pytest.raises(ValueError):
        tr.dump_solution(tmp_path / "bad.bin", u, 1, 0.1)
    (tmp_path / "trunc.bin").write_bytes(raw[:100])
    with pytest.raises(ValueError):
        tr.load_solution(tmp_path / "trunc.bin")
