"""Verification suites. Each returns a list of reports and is deterministic given its seed."""
from __future__ import annotations

import numpy as np
from scipy.linalg import eigh

from .. import averages as av
from .. import hyperbolicity as hy
from .. import royden as ry
from .. import schwarz as sw
from .. import torus as tr
from .._jax import jnp
from ..curvature import (TWO_PI, chern_curvature, hsc_sign_check, kahler_symmetry_defect,
                         ricci_and_scalar, ricci_logdet_check, unitary_frame)
from ..geometry import (build_model, check_kahler, evaluate_jet, get_model, model_catalog,
                        random_points)
from ..geometry.chart import Domain
from ..geometry.metric import MetricField, hermitian_check, jet_consistency_check
from ..report import FAIL, PASS, SKIPPED, VerificationReport, combine, compare, expect
from ..tensors import as_tensor, random_kahler_tensor, random_negative_tensor, space_form

CATALOG_PARAMS = {
    "flat": {"n": 2},
    "poincare-disc": {},
    "fubini-study-chart": {"n": 2},
    "complex-ball": {"n": 2},
    "product": {},
    "perturbed-torus": {"n": 2, "coupling": 0.2},
}


def _rng(seed: int, tag: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, sum(map(ord, tag))]))


def non_kahler_field() -> MetricField:
    """Hermitian but not closed: ``g_12 = conj(z_1)`` makes ``d_1 g_12 != d_2 g_11``."""

    def coeff(z, zb):
        one = 1.0 + 0.0 * z[0]
        return jnp.array([[one, zb[0]], [z[0], 2.0 * one]])

    return MetricField(2, coeff, Domain("polydisc"), name="non-kahler")


# ------------------------------------------------------------------ curvature

def curvature_suite(cfg: dict, seed: int = 0, tol_scale: float = 1.0) -> list:
    out = []
    rng = _rng(seed, "curvature")
    bindings = cfg["models"]
    if bindings is None:
        bindings = [{"name": m.name, "params": CATALOG_PARAMS[m.name]} for m in model_catalog()]
    for entry in bindings:
        model = get_model(entry["name"])
        metric = model.build(**entry.get("params", {}))
        pts = random_points(metric, rng, cfg["kahler_points"])
        out.append(combine("kahler-closedness",
                           [check_kahler(metric, p, tol=1e-12 * tol_scale) for p in pts],
                           witness={"model": model.name}))
        out.append(combine("jet-hermitian-symmetry",
                           [hermitian_check(metric, p, 1e-12 * tol_scale) for p in pts[:20]],
                           witness={"model": model.name}))
        few = pts[: cfg["points_per_model"]]
        out.append(combine("jet-consistency",
                           [jet_consistency_check(metric, p, rtol=1e-6 * tol_scale)
                            for p in few[:5]], witness={"model": model.name}))
        sym = []
        for p in pts[: cfg["symmetry_points"]]:
            d = kahler_symmetry_defect(chern_curvature(evaluate_jet(metric, p)))
            sym.append(compare("chern-kahler-symmetry", d, 0.0, "<=", 1e-8 * tol_scale,
                               witness={"model": model.name, "point": p}))
        out.append(combine("chern-kahler-symmetry", sym, witness={"model": model.name}))
        if model.name != "flat":
            out.append(combine("ricci-logdet",
                               [ricci_logdet_check(metric, p, 1e-6 * tol_scale) for p in few],
                               witness={"model": model.name}))
        out.append(hsc_sign_check(model, metric, few, rng, tol=1e-9 * tol_scale))
    bad = non_kahler_field()
    out.append(expect(check_kahler(bad, [0.3 + 0.1j, -0.2j]), FAIL, "kahler-closedness",
                      control="non-Kahler coefficient field is rejected"))
    # Einstein constant of the disc: Ric = c omega with c = -1/pi
    disc = build_model("poincare-disc")
    jet = evaluate_jet(disc, [0.0])
    ric = ricci_and_scalar(chern_curvature(jet))
    out.append(compare("ricci-logdet", ric.form[0, 0].real / jet.value[0, 0].real, -1.0 / np.pi, "==",
                       1e-12 * tol_scale, witness={"model": "poincare-disc", "point": 0},
                       note="Einstein constant of the disc metric"))
    return out


# ------------------------------------------------------------------ averages

def averages_suite(cfg: dict, seed: int = 0, tol_scale: float = 1.0) -> list:
    out = []
    from fractions import Fraction

    for n in range(1, cfg["max_moment_n"] + 1):
        t = av.SphereMomentTable.build(n)
        ok = (t.second_moment == Fraction(1, n) and t.fourth_diagonal == Fraction(2, n * (n + 1))
              and (n == 1 or t.fourth_mixed == Fraction(1, n * (n + 1))))
        total = n * t.fourth_diagonal + n * (n - 1) * t.fourth_mixed
        out.append(VerificationReport("sphere-moments", PASS if ok and total == 1 else FAIL,
                                      lhs=float(total), rhs=1.0, slack=float(total - 1),
                                      tolerance=0.0, relation="==", witness={"n": n},
                                      details={"table": [str(t.second_moment),
                                                         str(t.fourth_diagonal),
                                                         str(t.fourth_mixed)]}))
    # Monte Carlo moments for n = 2
    mode = av.MonteCarloMode(cfg["mc_samples"], seed, cfg["mc_workers"])
    for idx, exact in (((0, 0), 2 / 6), ((0, 1), 1 / 6)):
        mean, se = av.sphere_moment_mc(2, idx, idx, mode)
        out.append(compare("sphere-moments", mean, exact, "==", av.MC_SIGMAS * se,
                           witness={"n": 2, "indices": idx, "seed": seed}, mode="monte-carlo"))
    rng = _rng(seed, "averages")
    for n in cfg["dims"]:
        hbc, hsc = [], []
        for _ in range(cfg["tensors_per_n"]):
            t = as_tensor(random_kahler_tensor(rng, n))
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            r1 = av.average_hbc_identity(t, v)
            r2 = av.average_hsc_identity(t)
            r1.tolerance = r2.tolerance = av.IDENTITY_TOL * tol_scale
            hbc.append(_rejudge(r1))
            hsc.append(_rejudge(r2))
        out.append(combine("average-hbc-ricci", hbc, witness={"n": n}))
        out.append(combine("average-hsc-scalar", hsc, witness={"n": n}))
    # Monte Carlo cross-check; with mode "monte-carlo" it covers every dimension
    mc_dims = cfg["dims"] if cfg["mode"] == av.MONTE_CARLO else [2]
    for n in mc_dims:
        t = as_tensor(random_kahler_tensor(rng, n))
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        out.append(av.average_hbc_identity(t, v, mode))
        out.append(av.average_hsc_identity(t, mode))
    broken = random_kahler_tensor(rng, 2)
    broken[0, 1, 1, 0] += 0.5
    broken[1, 0, 0, 1] += 0.5
    out.append(expect(av.average_hsc_identity(as_tensor(broken)), FAIL, "average-hsc-scalar",
                      control="broken Kahler symmetry breaks the identity"))
    for n in (1, 2, 3):
        flat = as_tensor(np.zeros((n,) * 4))
        out.append(av.average_hsc_identity(flat))
    signs = []
    for k in range(cfg["sign_trials"]):
        n = 1 + k % 3
        signs.append(av.sign_propagation_check(as_tensor(random_negative_tensor(rng, n, 0.15)),
                                               rng))
    out.append(combine("average-sign-propagation", signs, witness={"seed": seed}))
    return out


def _rejudge(rep: VerificationReport) -> VerificationReport:
    from ..report import holds

    rep.status = PASS if holds(rep.slack, rep.relation, rep.tolerance) else FAIL
    return rep


# ------------------------------------------------------------------ royden

def royden_suite(cfg: dict, seed: int = 0, tol_scale: float = 1.0) -> list:
    out = []
    rng = _rng(seed, "royden")
    form = ry.BiHermitianForm(space_form(2, -1.0))
    rep = ry.royden_inequality_check(form, ry.FrameSpec(np.eye(2)), -1.0)
    out.append(compare("royden-nonpositive-bound", rep.lhs, -3.0, "==", 1e-12,
                       witness={"example": "space form K=-1, unitary frame, nu=n=2"},
                       general_bound=rep.details["general_bound"],
                       nonpositive_bound=rep.details["nonpositive_bound"]))
    out.append(rep)
    # positive K: only the general bound applies
    fs_form = ry.BiHermitianForm(space_form(3, 2.0))
    gen = ry.royden_inequality_check(fs_form, ry.random_orthogonal_frame(rng, 3, 3), 2.0)
    out.append(VerificationReport("royden-general-bound", gen.status, lhs=gen.lhs, rhs=gen.rhs,
                                  slack=gen.slack, tolerance=gen.tolerance, relation="<=",
                                  witness=gen.witness, details={"K": 2.0}))
    K = ry.hsc_upper_bound(form, rng=rng)
    out.append(compare("royden-inequality", K, -1.0, "==", 1e-6, witness={"form": "space form"},
                       note="empirical HSC bound of the constant-curvature form"))
    fs = unitary_frame(chern_curvature(evaluate_jet(build_model("fubini-study-chart", n=2),
                                                    [0.0, 0.0])))
    out.append(compare("royden-inequality", ry.hsc_upper_bound(ry.BiHermitianForm(fs.coeffs),
                                                                rng=rng),
                       get_model("fubini-study-chart").curvature_constant(), "==", 1e-6,
                       witness={"form": "fubini-study at 0"}))
    pol = []
    for _ in range(cfg["polarization_trials"]):
        n = int(rng.integers(1, 5))
        nu = int(rng.integers(1, n + 1))
        f = ry.BiHermitianForm(random_kahler_tensor(rng, n))
        full, red = ry.polarization_sum(f, ry.random_orthogonal_frame(rng, n, nu))
        pol.append(compare("royden-polarization", full, red, "==",
                           ry.POLARIZATION_TOL * tol_scale * max(1.0, abs(full)),
                           witness={"n": n, "nu": nu}))
    out.append(combine("royden-polarization", pol, witness={"seed": seed}))
    single = []
    for _ in range(20):
        n = int(rng.integers(1, 5))
        f = ry.BiHermitianForm(space_form(n, -1.0) + random_kahler_tensor(rng, n, 0.3))
        xi = ry.random_orthogonal_frame(rng, n, 1)
        v = xi.vectors[0]
        K = -0.5
        general, nonpos = ry.royden_bounds(K, np.array([f.norm2(v)]))
        single.append(compare("royden-single-vector", max(abs(general - K * f.norm2(v) ** 2),
                                                          abs(nonpos - K * f.norm2(v) ** 2)),
                              0.0, "==", 1e-12, witness={"n": n}))
    out.append(combine("royden-single-vector", single, witness={"seed": seed}))
    sweep = ry.royden_sweep(cfg["trials"], seed=seed, n_range=(cfg["n_min"], cfg["n_max"]),
                            max_nu=cfg["nu_max"])
    out.append(sweep.report())
    return out


# ------------------------------------------------------------------ schwarz

def _bump_metric() -> MetricField:
    return MetricField(1, lambda z, zb: jnp.reshape(1.0 + 0.3 * z[0] * zb[0], (1, 1)),
                       Domain("plane"), name="bump")


def laplacian_pairs() -> list[sw.MetricPair]:
    return [
        sw.MetricPair(build_model("flat"), build_model("flat"), [0.2]),
        sw.MetricPair(build_model("flat"), _bump_metric(), [0.2]),
        sw.MetricPair(build_model("fubini-study-chart"), build_model("poincare-disc"), [0.1]),
        sw.MetricPair(build_model("complex-ball"),
                      build_model("perturbed-torus", n=2, coupling=0.2), [0.3, 0.2j]),
        sw.MetricPair(build_model("fubini-study-chart", n=2), build_model("complex-ball"),
                      [0.3 + 0.1j, -0.2j]),
    ]


def lemma_matrix(rng: np.random.Generator, per_pair: int):
    """``(pair, lambda, mu, kappa)`` tuples over the disc, ball and perturbed-torus families."""
    disc = build_model("poincare-disc")
    ball = build_model("complex-ball")
    flat2 = build_model("flat", n=2)
    flat1 = build_model("flat")
    torus2 = build_model("perturbed-torus", n=2, coupling=0.2)
    torus1 = build_model("perturbed-torus", amplitude=0.3)
    cases = []
    for p in random_points(disc, rng, per_pair):
        cases.append((sw.MetricPair(disc, disc, p), 1 / np.pi, 0.0, 2.0))
    scales = (0.5, 1.0, 2.0)
    for i, p in enumerate(random_points(ball, rng, per_pair)):
        c = scales[i % 3]
        cases.append((sw.MetricPair(ball, ball.scaled(c), p), 3 / (2 * np.pi * c), 0.0, 2.0))
    half = per_pair // 2
    for base, prime in ((flat2, torus2), (flat1, torus1)):
        for p in random_points(prime, rng, half if base is flat2 else per_pair - half):
            pair = sw.MetricPair(base, prime, p)
            cases.append((pair, sw.einstein_lower_constant(pair), 0.0, 0.0))
    return cases


def schwarz_suite(cfg: dict, seed: int = 0, tol_scale: float = 1.0) -> list:
    out = []
    rng = _rng(seed, "schwarz")
    h = cfg["h"]
    dual = []
    for _ in range(cfg["dual_path_pairs"]):
        n = int(rng.integers(1, 5))
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g = A @ A.conj().T + 0.1 * np.eye(n)
        gp = B @ B.conj().T + 0.1 * np.eye(n)
        S_eig = float(np.sum(1.0 / eigh(gp.T, g.T, eigvals_only=True)))
        S_form = sw.mixed_determinant_trace(g, gp)
        dual.append(compare("trace-dual-path", S_eig, S_form, "==", 1e-10 * max(1.0, S_eig),
                            witness={"n": n}))
    out.append(combine("trace-dual-path", dual, witness={"seed": seed}))
    out.append(sw.trace_dual_path_check(sw.MetricPair(build_model("flat", n=3),
                                                      build_model("flat", n=3, scale=2.0),
                                                      [0, 0, 0])))
    for pair in laplacian_pairs():
        out.append(sw.laplacian_equality_check(pair, h, tol=sw.FD_FLOOR * tol_scale))
    cases = lemma_matrix(rng, cfg["points_per_pair"])
    for entry in cfg["pairs"]:
        pair = sw.MetricPair(build_model(entry["base"], **entry.get("base_params", {})),
                             build_model(entry["prime"], **entry.get("prime_params", {})),
                             entry["point"])
        cases.append((pair, entry.get("lambda", 0.0), entry.get("mu", 0.0),
                      entry.get("kappa", 0.0)))
    chains = [sw.lemma_chain_check(pair, lam, mu, kappa, h=h, rng=rng)
              for pair, lam, mu, kappa in cases]
    bundles = [r.details["lemmas"] for r in chains]
    parts = [p for b in bundles for p in b.details["parts"].values()]
    for cid in ("lemma-ricci-term", "lemma-gradient-term", "lemma-curvature-term"):
        out.append(combine(cid, [r for r in parts if r.claim_id == cid], witness={"seed": seed}))
    out.append(combine("estimate-lemmas", bundles, witness={"seed": seed}))
    out.append(combine("diffineq", [r.details["inequality"] for r in chains],
                       witness={"seed": seed}))
    chain = combine("lemma-chain", [_strip(r) for r in chains], witness={"seed": seed})
    chain.details["points"] = len(chains)
    out.append(chain)
    # sharpness probe: kappa inflated by 1% on the disc
    disc = build_model("poincare-disc")
    probe = sw.MetricPair(disc, disc, [0.2 + 0.1j])
    forced = sw.estimate_lemma_checks(probe, 1 / np.pi, 0.0, 2.02, enforce_hypotheses=False,
                                      rng=rng).details["parts"]["lemma-curvature-term"]
    out.append(expect(forced, FAIL, "lemma-curvature-term", control="kappa inflated by 1%"))
    guarded = sw.estimate_lemma_checks(probe, 1 / np.pi, 0.0, 2.02,
                                       rng=rng).details["parts"]["lemma-curvature-term"]
    out.append(expect(guarded, SKIPPED, "lemma-curvature-term",
                      control="inflated kappa fails the sampled hypothesis"))
    out.append(sw.trace_lemma_sweep(cfg["trace_lemma_count"], seed=seed))
    out.append(sw.trace_lemma_check(0.0, [1.0]))
    out.append(sw.trace_lemma_check(np.log(4.0), [2.0, 2.0]))
    flat = build_model("flat")
    out.append(sw.quasi_negative_inequality_check(sw.MetricPair(flat, flat, [0.3]),
                                                  lambda x: 0.0, 0.1, h))
    out.append(sw.quasi_negative_inequality_check(
        sw.MetricPair(disc, disc.scaled(2.0), [0.3 - 0.2j]),
        lambda x: sw.kappa_estimate(disc, x, rng=rng), 0.0, h))
    prod = build_model("product")
    out.append(sw.quasi_negative_inequality_check(
        sw.MetricPair(prod, prod.scaled(2.0), [0.4, 0.3j]),
        lambda x: sw.kappa_estimate(prod, x, rng=rng), 0.0, h))
    return out


def _strip(rep: VerificationReport) -> VerificationReport:
    rep.details.pop("lemmas", None)
    rep.details.pop("inequality", None)
    return rep


# ------------------------------------------------------------------ monge-ampere

def ma_suite(cfg: dict, seed: int = 0, tol_scale: float = 1.0) -> list:
    out = []
    for eps in cfg["flat_eps"]:
        prob = tr.assemble_problem("flat", {}, eps, 32)
        st = tr.solve(prob, tol=1e-12)
        err = float(np.max(np.abs(st.u - np.log(eps))))
        out.append(combine("ma-solution", [
            compare("ma-solution", st.residual_norm, 0.0, "<=", 1e-12, witness={"eps": eps}),
            compare("ma-solution", err, 0.0, "<=", 1e-10, witness={"eps": eps}),
        ], witness={"background": "flat", "eps": eps}, sup_u=float(np.max(st.u))))
        out.append(tr.verify_ke_relation(prob, st, 1e-6 * tol_scale))
        out.append(tr.verify_sup_bound(prob, st, cfg["eps0"]))
    params = {"amplitude": cfg["amplitude"]}
    grid = cfg["grid"]
    prob = tr.assemble_problem("perturbed-torus", params, cfg["eps"], grid)
    st = tr.solve(prob)
    out.append(compare("ma-solution", st.residual_norm, 0.0, "<=", 1e-10,
                       witness={"background": "perturbed-torus", "grid": grid, "eps": cfg["eps"]},
                       iterations=st.iterations, positivity_margin=st.positivity_margin,
                       history=st.history))
    st2 = tr.solve(prob, u0=np.full(prob.grid.shape, prob.n * np.log(prob.eps)))
    out.append(compare("ma-uniqueness", float(np.max(np.abs(st.u - st2.u))), 0.0, "<=", 1e-9,
                       witness={"grid": grid, "eps": cfg["eps"]}))
    coarse = tr.solve(tr.assemble_problem("perturbed-torus", params, cfg["eps"], grid // 2))
    out.append(compare("ma-solution", float(np.max(np.abs(st.u[::2, ::2] - coarse.u))), 0.0,
                       "<=", 1e-6, witness={"grids": [grid // 2, grid]},
                       note="self-convergence under grid doubling"))
    out.append(tr.verify_ke_relation(prob, st, 1e-6 * tol_scale))
    out.append(tr.verify_sup_bound(prob, st, cfg["eps0"]))
    C = tr.sup_bound_constant(prob, cfg["eps0"])
    bad = tr.verify_sup_bound(prob, st, cfg["eps0"], u=st.u + 2 * abs(C) + 1.0)
    out.append(expect(bad, FAIL, "sup-upper-bound", control="shifted u must violate the bound"))
    trace_checks = []
    sweeps = [("flat", {}, 32, "flat"), ("perturbed-torus", params, grid, "perturbed-torus")]
    if cfg["n2"]:
        sweeps += [("flat", {"n": 2}, 8, "flat n=2"),
                   ("perturbed-torus", {"n": 2, "amplitude": cfg["amplitude"],
                                        "coupling": cfg["n2_coupling"]}, cfg["n2_grid"],
                    "perturbed-torus n=2")]
    for name, prm, size, label in sweeps:
        base = tr.assemble_problem(name, prm, cfg["sweep_eps"][0], size)
        rec = tr.eps_sweep(base, cfg["sweep_eps"], checks=trace_checks)
        rep = tr.volume_slope_check(rec)
        rep.witness["background"] = label
        out.append(rep)
        sup = [compare("sup-upper-bound", s, tr.sup_bound_constant(base, cfg["eps0"]), "<=", 0.0,
                       witness={"background": label, "eps": e})
               for e, s in zip(rec.eps, rec.sup_u)]
        out.append(combine("sup-upper-bound", sup, witness={"background": label}))
    out.append(combine("elementary-trace-inequality", trace_checks, witness={"sweeps": len(sweeps)}))
    # integral inequality chain
    out.append(tr.integral_chain_check(1, 4.0, 1.0))
    out.append(compare("sup-lower-bound", tr.sup_lower_bound(1, 4.0), -np.log(np.pi / 2), "==",
                       1e-14, witness={"n": 1, "kappa": 4.0}))
    disc = tr.DiscSurrogate()
    kappa = -get_model("poincare-disc").curvature_constant()
    out.append(compare("integral-inequality", disc.kappa, kappa, "==", 0.0,
                       witness={"surrogate": "disc"}, note="surrogate kappa equals the oracle"))
    out.append(tr.integral_inequality_check(disc))
    out.append(expect(tr.integral_chain_check(1, 40.0, 3.0), FAIL, "integral-inequality",
                      control="kappa inflated tenfold"))
    return out


# ------------------------------------------------------------------ hyperbolicity

def hyperbolicity_suite(cfg: dict, seed: int = 0, tol_scale: float = 1.0) -> list:
    out = []
    rng = _rng(seed, "hyperbolicity")

    def verdict(curve, kappa, expected):
        rep = hy.demailly_bound(curve, kappa)
        ok = rep.details["verdict"] == expected
        return VerificationReport("demailly-criterion", PASS if ok else FAIL, lhs=rep.lhs,
                                  rhs=rep.rhs, slack=rep.slack, tolerance=0.0, relation=">=",
                                  witness=rep.witness, details={"verdict": rep.details["verdict"],
                                                                "expected": expected})

    for kappa in (0.5, 1.0, 4.0):
        out.append(verdict(hy.CurveData(0, 1.0), kappa, hy.OBSTRUCTED))
        out.append(verdict(hy.CurveData(1, 1.0), kappa, hy.OBSTRUCTED))
    out.append(verdict(hy.CurveData(0, 3.0), 0.0, hy.OBSTRUCTED))
    out.append(verdict(hy.CurveData(2, 1.0, (4,)), 0.0, hy.OBSTRUCTED))
    out.append(verdict(hy.CurveData(3, 1.0), 1.0, hy.CONSISTENT))
    mono = []
    for _ in range(200):
        c = hy.CurveData(int(rng.integers(0, 6)), float(rng.uniform(0.1, 10)),
                         tuple(int(m) for m in rng.integers(2, 5, rng.integers(0, 3))))
        k = float(rng.uniform(0, 5))
        base = hy.demailly_bound(c, k).details["verdict"]
        bigger = hy.demailly_bound(hy.CurveData(c.genus, c.degree * 2, c.multiplicities + (2,)),
                                   k * 1.5).details["verdict"]
        bad = base == hy.OBSTRUCTED and bigger == hy.CONSISTENT
        mono.append(VerificationReport("demailly-criterion", FAIL if bad else PASS,
                                       witness={"curve": [c.genus, c.degree], "kappa": k}))
    out.append(combine("demailly-criterion", mono, witness={"property": "monotone"}))
    for d, g in ((1, 0), (4, 3), (5, 6)):
        out.append(compare("pluecker-genus", hy.pluecker_genus(d), g, "==", 0.0,
                           witness={"d": d}))
    for g, deg in ((0, 2), (1, 0), (2, -2)):
        out.append(compare("hurwitz-degree", hy.hurwitz_tangent_degree(g), deg, "==", 0.0,
                           witness={"g": g}))
    for entry in cfg["curves"]:
        curve = hy.CurveData(int(entry["genus"]), float(entry["degree"]),
                             tuple(entry.get("multiplicities", ())))
        rep = hy.demailly_bound(curve, float(entry["kappa"]))
        out.append(verdict(curve, float(entry["kappa"]), entry["expect"]) if "expect" in entry
                   else rep)
    out.append(hy.validate_surface_example(hy.SurfaceExampleParams(**cfg["surface_example"])))
    for bad in ((2, 3, 5, 4), (2, 4, 6, 5), (2, 5, 4, 4), (2, 4, 5, 3), (1, 4, 5, 4)):
        out.append(expect(hy.validate_surface_example(hy.SurfaceExampleParams(*bad)), FAIL,
                          control=f"violated constraint {bad}"))
    out.append(_distance_checks(rng, cfg["triangle_triples"]))
    out.extend(_subharmonic_checks(rng, cfg["disc_maps"], tol_scale))
    return out


def _random_disc(rng, size, r=0.95):
    return r * np.sqrt(rng.random(size)) * np.exp(2j * np.pi * rng.random(size))


def _distance_checks(rng, triples: int) -> VerificationReport:
    z, w, x = (_random_disc(rng, triples) for _ in range(3))
    d = np.vectorize(hy.poincare_distance)
    dzw, dwx, dzx = d(z, w), d(w, x), d(z, x)
    tri = float(np.max(dzx - dzw - dwx))
    sym = float(np.max(np.abs(dzw - d(w, z))))
    m = hy.mobius(0.3 - 0.2j, 0.7)
    iso = float(np.max(np.abs(d(m(z), m(w)) - dzw)))
    contraction = float(np.max(d(z ** 2, w ** 2) - dzw))
    reports = [
        compare("poincare-distance", tri, 0.0, "<=", 1e-12, witness={"test": "triangle"}),
        compare("poincare-distance", sym, 0.0, "<=", 1e-12, witness={"test": "symmetry"}),
        compare("poincare-distance", iso, 0.0, "<=", 1e-9, witness={"test": "automorphism"}),
        compare("poincare-distance", contraction, 0.0, "<=", 1e-12,
                witness={"test": "z^2 contracts"}),
        compare("poincare-distance", hy.poincare_distance(0, 0), 0.0, "==", 0.0,
                witness={"test": "zero"}),
        compare("poincare-distance", hy.poincare_distance(0, 0.25),
                hy.poincare_distance(0, 0.5), "<=", 0.0, witness={"test": "f(z)=z^2 at 0.5"}),
    ]
    return combine("poincare-distance", reports, witness={"triples": triples})


def _subharmonic_checks(rng, count: int, tol_scale: float) -> list:
    out = []
    disc = build_model("poincare-disc")
    k_disc = -get_model("poincare-disc").curvature_constant()
    ball = build_model("complex-ball")
    k_ball = -get_model("complex-ball").curvature_constant(n=2)
    flat = build_model("flat")
    prod = build_model("product")
    first = hy.subharmonicity_defect(disc, hy.DiscMap([0, 0.5]), 0.0, k_disc)
    out.append(first)
    out.append(hy.subharmonicity_defect(disc, hy.DiscMap([0, 0, 1]), 0.1, k_disc, 1e-3))
    eq, strict = [], []
    for _ in range(count):
        c = np.zeros(4, complex)
        c[0] = 0.2 * _random_disc(rng, 1)[0]
        c[1:] = 0.2 * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
        t = 0.5 * _random_disc(rng, 1)[0]
        eps = float(rng.choice([0.0, 1e-3, 1e-1]))
        rep = hy.subharmonicity_defect(disc, hy.DiscMap(c), t, k_disc, eps)
        out.append(rep)
        eq.append(compare("subharmonicity", rep.details["equality_defect"], 0.0, "<=",
                          1e-6 * tol_scale, witness=rep.witness,
                          note="constant curvature on a curve gives equality"))
        strict.append(_strictly_positive(rep))
        cb = 0.15 * (rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
        rep = hy.subharmonicity_defect(ball, hy.DiscMap(cb), 0.3 * _random_disc(rng, 1)[0],
                                       k_ball, eps)
        out.append(rep)
        strict.append(_strictly_positive(rep))
        cf = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        out.append(hy.subharmonicity_defect(flat, hy.DiscMap(cf), 0.1, 0.0, 0.0))
        cp = 0.15 * (rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
        out.append(hy.subharmonicity_defect(prod, hy.DiscMap(cp), 0.2, 0.0, eps))
    strict_rep = combine("subharmonicity", strict, witness={"property": "strict off f'=0"})
    out.append(combine("subharmonicity", eq, witness={"property": "equality on the disc"}))
    out.append(strict_rep)
    return out


def _strictly_positive(rep: VerificationReport) -> VerificationReport:
    out = compare("subharmonicity", rep.lhs, 0.0, ">=", 0.0, witness=rep.witness)
    if not rep.lhs > 0:
        out.status = FAIL
    return out


SUITE_FUNCTIONS = {
    "curvature": curvature_suite,
    "averages": averages_suite,
    "royden": royden_suite,
    "schwarz": schwarz_suite,
    "ma": ma_suite,
    "hyperbolicity": hyperbolicity_suite,
}
