"""``kahlerlab`` command line: verification suites, the torus solver and eps sweeps."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .. import torus as tr
from ..errors import ConfigError, KahlerLabError
from ..report import FAIL, PASS, SKIPPED, VerificationReport, claim_registry, compare
from .config import SUITES, load_config
from .suites import SUITE_FUNCTIONS

log = logging.getLogger("kahlerlab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _selected(cfg: dict) -> list[str]:
    return list(SUITES) if cfg["suite"] == "all" else [cfg["suite"]]


def run_suite(cfg: dict) -> tuple[int, list[VerificationReport]]:
    """Run the suites selected by ``cfg``; exit status is 0 iff nothing failed.

    Reports are ordered by claim id (stable within an id), so the output does
    not depend on whether suites ran in parallel.
    """
    names = _selected(cfg)
    seed, scale = int(cfg["seed"]), float(cfg["tol_scale"])

    def one(name):
        t0 = time.perf_counter()
        reps = SUITE_FUNCTIONS[name](cfg[name], seed, scale)
        log.info("suite %s: %d reports in %.1f s", name, len(reps), time.perf_counter() - t0)
        return reps

    if cfg["parallel"] and len(names) > 1:
        with ThreadPoolExecutor(len(names)) as pool:
            batches = list(pool.map(one, names))
    else:
        batches = [one(name) for name in names]
    reports = [r for batch in batches for r in batch]
    return _finish(reports)


def _finish(reports: list[VerificationReport]) -> tuple[int, list[VerificationReport]]:
    registry = claim_registry()
    unknown = sorted({r.claim_id for r in reports} - set(registry))
    if unknown:
        raise KahlerLabError(f"claim ids missing from the registry: {unknown}")
    reports = sorted(reports, key=lambda r: r.claim_id)
    return (EXIT_FAIL if any(r.failed for r in reports) else EXIT_OK), reports


def summary_table(reports: list[VerificationReport]) -> str:
    counts: dict[str, dict[str, int]] = {}
    for r in reports:
        row = counts.setdefault(r.claim_id, {PASS: 0, FAIL: 0, SKIPPED: 0})
        row[r.status] += 1
    width = max([len(c) for c in counts] + [len("claim")])
    lines = [f"{'claim':<{width}}  {'pass':>6} {'fail':>6} {'skip':>6}"]
    for cid, row in counts.items():
        lines.append(f"{cid:<{width}}  {row[PASS]:>6} {row[FAIL]:>6} {row[SKIPPED]:>6}")
    total = {s: sum(row[s] for row in counts.values()) for s in (PASS, FAIL, SKIPPED)}
    lines.append(f"{'total':<{width}}  {total[PASS]:>6} {total[FAIL]:>6} {total[SKIPPED]:>6}")
    return "\n".join(lines)


def emit_sweep_plotdata(record: tr.EpsSweepRecord, path) -> Path:
    """Whitespace-separated ``eps integral sup_u slope_so_far`` under a ``#`` header."""
    if not record.eps:
        raise ValueError("empty sweep record; nothing to plot")
    rows = zip(record.eps, record.integrals, record.sup_u, record.running_slopes())
    body = "".join(f"{e:.17g} {i:.17g} {s:.17g} {k:.17g}\n" for e, i, s, k in rows)
    path = Path(path)
    path.write_text(f"# eps integral sup_u slope_so_far  (n={record.n})\n" + body)
    return path


def write_outputs(reports, out_dir, started: float) -> None:
    lines = "".join(r.to_json() + "\n" for r in reports)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    footer = f"\ngenerated {stamp} in {time.perf_counter() - started:.1f} s\n"
    table = summary_table(reports)
    if out_dir is None:
        sys.stdout.write(lines)
        sys.stderr.write(table + footer)
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "reports.jsonl").write_text(lines)
    (out / "summary.txt").write_text(table + footer)
    sys.stderr.write(table + footer)


# ---------------------------------------------------------------- single-purpose commands

def _ma_problem(args):
    params = {}
    if args.n != 1:
        params["n"] = args.n
    if args.background == "perturbed-torus":
        params["amplitude"] = args.amplitude
    return tr.assemble_problem(args.background, params, args.eps, args.grid)


def cmd_ma(args, cfg) -> list[VerificationReport]:
    prob = _ma_problem(args)
    state = tr.solve(prob, tol=args.tol)
    for rec in state.history:
        log.info(json.dumps({"event": "newton", **rec}, sort_keys=True))
    sup = float(np.max(state.u))
    reports = [compare("ma-solution", state.residual_norm, 0.0, "<=", args.tol,
                       witness={"background": args.background, "eps": args.eps,
                                "grid": args.grid, "n": prob.n},
                       sup_u=sup, inf_u=float(np.min(state.u)), iterations=state.iterations,
                       positivity_margin=state.positivity_margin, history=state.history),
               tr.verify_ke_relation(prob, state, 1e-6 * float(cfg["tol_scale"]))]
    if args.eps < cfg["ma"]["eps0"]:
        reports.append(tr.verify_sup_bound(prob, state, cfg["ma"]["eps0"]))
    if args.dump:
        tr.dump_solution(args.dump, state.u, prob.n, prob.eps)
    return reports


def cmd_sweep(args, cfg) -> list[VerificationReport]:
    eps = args.eps or cfg["ma"]["sweep_eps"]
    args.eps = eps[0]
    base = _ma_problem(args)
    checks: list = []
    record = tr.eps_sweep(base, eps, checks=checks)
    if args.plot:
        emit_sweep_plotdata(record, args.plot)
    rep = tr.volume_slope_check(record)
    rep.witness["background"] = args.background
    return [rep, *checks]


def _overrides(args) -> dict:
    out = {}
    for key in ("seed", "tol_scale", "out"):
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    if getattr(args, "parallel", False):
        out["parallel"] = True
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="directory for reports.jsonl and summary.txt")
    common.add_argument("--parallel", action="store_true", help="run suites concurrently")
    common.add_argument("--tol-scale", dest="tol_scale", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="kahlerlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-all", parents=[common], help="run every suite")
    run = sub.add_parser("run", parents=[common], help="run the suite named by --suite")
    run.add_argument("--suite", choices=SUITES + ("all",))
    for name in ("curvature", "schwarz", "hyperbolicity"):
        sub.add_parser(name, parents=[common], help=f"run the {name} suite")
    avg = sub.add_parser("averages", parents=[common], help="run the averages suite")
    avg.add_argument("--mode", choices=("exact", "monte-carlo"))
    avg.add_argument("--samples", type=int, help="Monte Carlo sample count")
    roy = sub.add_parser("royden", parents=[common], help="run the Royden suite")
    roy.add_argument("--trials", type=int)
    for name, helptext in (("ma", "solve one torus problem"), ("sweep", "eps sweep")):
        q = sub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("--background", choices=tr.solver.TORUS_BACKGROUNDS, default="flat")
        q.add_argument("--n", type=int, default=1)
        q.add_argument("--grid", type=int, default=32)
        q.add_argument("--amplitude", type=float, default=0.1)
        q.add_argument("--tol", type=float, default=1e-11)
        if name == "ma":
            q.add_argument("--eps", type=float, default=0.1)
            q.add_argument("--dump", help="write u as a binary grid dump")
        else:
            q.add_argument("--eps", type=float, nargs="+", help="decreasing eps values")
            q.add_argument("--plot", help="write plot columns to this file")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(message)s")
    started = time.perf_counter()
    overrides = _overrides(args)
    cmd = args.command
    if cmd in SUITES:
        overrides["suite"] = cmd
    elif cmd == "run" and args.suite:
        overrides["suite"] = args.suite
    elif cmd == "verify-all":
        overrides["suite"] = "all"
    if cmd == "royden" and args.trials is not None:
        overrides["royden"] = {"trials": args.trials}
    if cmd == "averages":
        section = {k: v for k, v in (("mode", args.mode), ("mc_samples", args.samples))
                   if v is not None}
        if section:
            overrides["averages"] = section
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    try:
        if cmd in ("ma", "sweep"):
            reps = cmd_ma(args, cfg) if cmd == "ma" else cmd_sweep(args, cfg)
            status, reports = _finish(reps)
        else:
            status, reports = run_suite(cfg)
    except (KahlerLabError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    write_outputs(reports, cfg["out"], started)
    return status


if __name__ == "__main__":
    sys.exit(main())
