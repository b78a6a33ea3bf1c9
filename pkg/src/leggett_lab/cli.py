"""Command line interface.

Subcommands:

    correlate   dual-route correlation table for the maximally entangled state
    verify      run the derivation checks, one PASS or FAIL line each
    scan        tabulate the closed tripartite surface to CSV (plus figure)
    optimize    locate the maximal left side (JSON report plus figure)
    oracle      randomized hidden-variable runs to JSONL (plus figure)

All randomness flows from --seed (or the LEGGETT_LAB_SEED variable); a fixed
seed gives byte-identical output files, figures included. Angles are radians
unless a command says otherwise. Exit codes: 0 success, 1 a check or bound
failed, 2 bad arguments.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from .geometry import (
    bipartite_settings,
    fig1_settings,
    frame_bound_margin,
    from_spherical,
    random_rotation,
    random_xy_settings,
    validate_ensemble,
    xy_plane_settings,
)
from .ghzform import (
    ghz_correlation_closed,
    ghz_correlation_vectors,
    ghz_correlator,
    ghz_reduced_correlation,
)
from .ineq import (
    bipartite_average,
    evaluate_tight,
    shared_settings_form,
    tripartite_ghz_closed,
)
from .oracle import (
    ensemble_inequality_check,
    identity_check,
    inadmissible_counterexample,
    random_ensemble,
    sample_admissible,
    verify_constraint_chain,
)
from .rng import make_rng, resolve_seed, sphere_points

TWO_PI = 2.0 * math.pi


def _fmt(value: float) -> str:
    return repr(float(value))


# ---------------------------------------------------------------- correlate


def cmd_correlate(args) -> int:
    from .qcore import correlation_bruteforce, ghz_density, partial_trace

    if not 2 <= args.parties <= 6:
        raise ValueError(f"--parties must be in [2, 6], got {args.parties}")
    seed = resolve_seed(args.seed)
    rng = make_rng(seed)
    n = args.parties
    rho = ghz_density(n)
    rho_reduced = partial_trace(rho, n)

    worst_full = 0.0
    worst_reduced = 0.0
    lines = [
        "# leggett-lab correlate v1",
        "trial,n_parties,closed,vectors,bruteforce,reduced_closed,"
        "reduced_bruteforce,gap_full,gap_reduced",
    ]
    for trial in range(args.trials):
        polar = rng.uniform(0.0, math.pi, size=n)
        azimuth = rng.uniform(0.0, TWO_PI, size=n)
        angles = list(zip(polar, azimuth))
        directions = [from_spherical(p, a) for p, a in angles]
        closed = ghz_correlation_closed(n, angles)
        vectors = ghz_correlation_vectors(directions)
        brute = correlation_bruteforce(rho, directions)
        reduced_closed = ghz_reduced_correlation(n, directions[:-1])
        reduced_brute = correlation_bruteforce(rho_reduced, directions[:-1])
        gap_full = max(abs(closed - brute), abs(vectors - brute))
        gap_reduced = abs(reduced_closed - reduced_brute)
        worst_full = max(worst_full, gap_full)
        worst_reduced = max(worst_reduced, gap_reduced)
        lines.append(
            f"{trial},{n},{_fmt(closed)},{_fmt(vectors)},{_fmt(brute)},"
            f"{_fmt(reduced_closed)},{_fmt(reduced_brute)},"
            f"{_fmt(gap_full)},{_fmt(gap_reduced)}"
        )
    with open(args.out, "w", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")

    print(f"correlate: {args.trials} trials, {n} parties, seed {seed}")
    print(f"  max |closed - bruteforce|  = {_fmt(worst_full)}")
    print(f"  max |reduced - bruteforce| = {_fmt(worst_reduced)}")
    print(f"  wrote {args.out}")
    return 0 if max(worst_full, worst_reduced) <= 1e-10 else 1


# ------------------------------------------------------------------- verify


def _check_identity(rng, args):
    report = identity_check(8)
    return report.ok, f"assignments={report.assignments} failures={len(report.failures)}"


def _check_admissible_chain(rng, args):
    worst = -math.inf
    sets = 0
    for _ in range(200):
        n = int(rng.integers(2, 6))
        polarizations = sphere_points(rng, (n,))
        directions = sphere_points(rng, (n,))
        singles = np.einsum("jc,jc->j", polarizations, directions)
        cset = sample_admissible(rng, n, singles)
        designated = int(rng.integers(1, n + 1))
        worst = max(worst, verify_constraint_chain(cset, designated).max_slack)
        sets += 1
    if args.selftest_break:
        worst = max(
            worst, verify_constraint_chain(inadmissible_counterexample(3), 1).max_slack
        )
        sets += 1
    return worst <= 1e-12, f"sets={sets} max_slack={worst:.3e}"


def _check_counterexample(rng, args):
    cset = inadmissible_counterexample(3)
    chain = verify_constraint_chain(cset, 1)
    flagged = (not cset.is_admissible()) and chain.max_slack > 0.5
    return (
        flagged,
        f"min_probability={cset.min_probability():.3f} max_slack={chain.max_slack:.3f}",
    )


def _check_frame_bound(rng, args):
    points = sphere_points(rng, (100_000,))
    margins = frame_bound_margin(points)
    return float(margins.min()) >= -1e-12, (
        f"points={points.shape[0]} min_margin={float(margins.min()):.3e}"
    )


def _check_settings(rng, args):
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 6))
        ensemble = random_xy_settings(rng, n)
        if rng.uniform() < 0.5:
            ensemble = ensemble.rotated(random_rotation(rng))
        report = validate_ensemble(ensemble)
        if not report.ok:
            return False, f"invalid ensemble (n={n}): {report.failures()[0].name}"
        worst = max(worst, report.max_residual())
        roundtrip = type(ensemble).from_json(ensemble.to_json())
        if not validate_ensemble(roundtrip).ok:
            return False, f"json roundtrip broke validation (n={n})"
    return True, f"ensembles=50 max_residual={worst:.3e}"


def _check_tight_vs_closed(rng, args):
    correlator = ghz_correlator(3)
    worst = 0.0
    for _ in range(200):
        theta = float(rng.uniform(0.0, math.pi))
        phi = float(rng.uniform(0.0, TWO_PI))
        psi = float(rng.uniform(0.0, TWO_PI))
        tight = evaluate_tight(fig1_settings(theta, phi, psi), correlator)
        closed = tripartite_ghz_closed(theta, phi, psi)
        worst = max(
            worst,
            abs(tight.lhs_plus - closed.lhs_plus),
            abs(tight.lhs_minus - closed.lhs_minus),
        )
    return worst <= 1e-12, f"points=200 max_gap={worst:.3e}"


def _check_model_batch(rng, args):
    worst_final = -math.inf
    worst_chain = -math.inf
    for _ in range(30):
        n = int(rng.integers(2, 5))
        settings = random_xy_settings(rng, n)
        if rng.uniform() < 0.5:
            settings = settings.rotated(random_rotation(rng))
        model = random_ensemble(rng, n)
        report = ensemble_inequality_check(
            model, settings, rng, raise_on_violation=False
        )
        if not report.ok:
            return False, (
                f"violation at n={n}: final margin {report.max_final_margin:.3e}, "
                f"intermediate {report.max_intermediate_margin:.3e}"
            )
        worst_final = max(worst_final, report.max_final_margin)
        worst_chain = max(worst_chain, report.chain_max_slack, report.pair_max_slack)
    return True, (
        f"models=30 max_final_margin={worst_final:.3e} max_chain_slack={worst_chain:.3e}"
    )


def _check_optimum(rng, args):
    from .optim import maximize_violation

    details = []
    ok = True
    for branch in ("plus", "minus"):
        report = maximize_violation(branch)
        ok = ok and abs(report.deviation) <= 1e-9 and abs(report.theta_deviation) <= 1e-6
        details.append(f"{branch}: value={report.value!r} dtheta={report.theta_deviation:.2e}")
    return ok, "; ".join(details)


def _check_bipartite(rng, args):
    theta = math.pi / 2.0
    evaluation = bipartite_average(
        bipartite_settings(theta, (TWO_PI - theta) % TWO_PI), ghz_correlator(2)
    )
    expected = (2.0 + 2.0 * math.sqrt(2.0)) / 3.0
    ok = (
        abs(evaluation.lhs - expected) <= 1e-12
        and evaluation.margin_minus > 0.05
        and evaluation.margin_plus > 0.05
    )
    return ok, (
        f"lhs={evaluation.lhs!r} margin_minus={evaluation.margin_minus:.4f}"
    )


def _check_shared_settings(rng, args):
    correlator = ghz_correlator(3)
    ceiling = 2.0 * math.sqrt(5.0)
    worst = -math.inf
    grid = np.linspace(0.0, math.pi, 21)
    azimuths = np.linspace(0.0, TWO_PI, 21)
    for theta in grid:
        for phi in azimuths:
            ensemble = xy_plane_settings(
                3, 1, theta, [[phi / 2.0, 0.0, 0.0], [0.0, math.pi / 2.0, 0.0]]
            )
            worst = max(worst, shared_settings_form(ensemble, correlator).lhs)
    return worst <= ceiling + 1e-9, (
        f"max_lhs={worst!r} ceiling={ceiling!r} (no violation possible)"
    )


_VERIFY_CHECKS = (
    ("identity", _check_identity),
    ("admissible_chain", _check_admissible_chain),
    ("counterexample_flagged", _check_counterexample),
    ("frame_bound", _check_frame_bound),
    ("settings_validation", _check_settings),
    ("tight_matches_closed", _check_tight_vs_closed),
    ("model_batch", _check_model_batch),
    ("optimum", _check_optimum),
    ("bipartite_violation", _check_bipartite),
    ("shared_settings_ceiling", _check_shared_settings),
)


def cmd_verify(args) -> int:
    seed = resolve_seed(args.seed)
    passed = 0
    for index, (name, check) in enumerate(_VERIFY_CHECKS):
        rng = make_rng(seed, stream=index + 1)
        ok, detail = check(rng, args)
        passed += ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    total = len(_VERIFY_CHECKS)
    print(f"{passed}/{total} checks passed (seed {seed})")
    return 0 if passed == total else 1


# --------------------------------------------------------------------- scan


def cmd_scan(args) -> int:
    from .optim import grid_scan

    grid = grid_scan(args.n_theta, args.n_phi, args.n_psi)
    scale = 180.0 / math.pi if args.degrees else 1.0
    lines = ["# leggett-lab scan v1"]
    if args.degrees:
        lines.append("# units: degrees")
    lines.append("theta,phi,psi,L_plus,L_minus,margin_plus,margin_minus")
    bound = grid.bound
    for it, theta in enumerate(grid.theta):
        for jf, phi in enumerate(grid.phi):
            row_plus = grid.lhs_plus[it, jf]
            row_minus = grid.lhs_minus[it, jf]
            for kp, psi in enumerate(grid.psi):
                lp = row_plus[kp]
                lm = row_minus[kp]
                lines.append(
                    f"{_fmt(theta * scale)},{_fmt(phi * scale)},{_fmt(psi * scale)},"
                    f"{_fmt(lp)},{_fmt(lm)},{_fmt(lp - bound)},{_fmt(lm - bound)}"
                )
    with open(args.out, "w", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")

    best_plus, angles_plus = grid.best_plus
    best_minus, angles_minus = grid.best_minus
    print(
        f"scan: {grid.theta.size} x {grid.phi.size} x {grid.psi.size} grid "
        f"({grid.n_points} points)"
    )
    print(
        f"  best plus  = {_fmt(best_plus)} at theta={_fmt(angles_plus.theta)} "
        f"phi={_fmt(angles_plus.phi)} psi={_fmt(angles_plus.psi)}"
    )
    print(
        f"  best minus = {_fmt(best_minus)} at theta={_fmt(angles_minus.theta)} "
        f"phi={_fmt(angles_minus.phi)} psi={_fmt(angles_minus.psi)}"
    )
    print(f"  wrote {args.out}")
    if not args.no_plot:
        from . import plotting

        print(f"  wrote {plotting.render_scan_figure(grid, args.fig_out)}")
    return 0


# ----------------------------------------------------------------- optimize


def cmd_optimize(args) -> int:
    from .optim import maximize_violation

    branches = ("plus", "minus") if args.branch == "both" else (args.branch,)
    reports = [maximize_violation(branch) for branch in branches]
    document = {report.branch: report.as_dict() for report in reports}
    with open(args.out, "w", newline="\n") as handle:
        json.dump(document, handle, indent=2, sort_keys=True)
        handle.write("\n")

    failed = False
    for report in reports:
        print(
            f"{report.branch}: value={_fmt(report.value)} "
            f"(expected {_fmt(report.expected)}, deviation {report.deviation:.3e})"
        )
        print(
            f"  theta={_fmt(report.theta)} (expected {_fmt(report.theta_expected)}, "
            f"deviation {report.theta_deviation:.3e})"
        )
        print(
            f"  phi={_fmt(report.phi)} psi={_fmt(report.psi)} "
            f"locus_residual={report.locus_residual:.3e} "
            f"evaluations={report.evaluations}"
        )
        if report.cross_check_gap is not None:
            print(f"  cross-check against evaluated settings: gap {report.cross_check_gap:.3e}")
        if abs(report.deviation) > 1e-6 or abs(report.theta_deviation) > 1e-6:
            failed = True
    print(f"wrote {args.out}")
    if not args.no_plot:
        from . import plotting

        print(f"wrote {plotting.render_optimum_figure(reports, args.fig_out)}")
    if args.check and failed:
        print("check failed: optimum off target", file=sys.stderr)
        return 1
    return 0


# ------------------------------------------------------------------- oracle


def _oracle_trial(seed: int, parties: int, atoms: int, trial: int) -> dict:
    rng = make_rng(seed, stream=trial + 1)
    n = parties if parties else int(rng.integers(2, 6))
    settings = random_xy_settings(rng, n)
    if rng.uniform() < 0.5:
        settings = settings.rotated(random_rotation(rng))
    model = random_ensemble(rng, n, n_atoms=atoms if atoms else None)
    report = ensemble_inequality_check(model, settings, rng, raise_on_violation=False)
    return {
        "seed": seed,
        "trial": trial,
        "stream": trial + 1,
        "n_parties": n,
        "n_atoms": model.n_atoms,
        "theta": float(settings.theta),
        "final_margin_plus": report.final_margin_plus,
        "final_margin_minus": report.final_margin_minus,
        "max_intermediate_margin": report.max_intermediate_margin,
        "frame_margin_plus": report.frame_margin_plus,
        "frame_margin_minus": report.frame_margin_minus,
        "chain_max_slack": report.chain_max_slack,
        "pair_max_slack": report.pair_max_slack,
        "ok": report.ok,
    }


def _ascii_histogram(values, bins: int = 10, width: int = 40) -> list:
    values = np.asarray(values, dtype=float)
    counts, edges = np.histogram(values, bins=bins)
    top = max(int(counts.max()), 1)
    rows = []
    for count, lo, hi in zip(counts, edges[:-1], edges[1:]):
        bar = "#" * max(int(round(width * count / top)), 1 if count else 0)
        rows.append(f"  [{lo:+.3e}, {hi:+.3e})  {bar} {count}")
    return rows


def cmd_oracle(args) -> int:
    if args.parties and not 2 <= args.parties <= 6:
        raise ValueError(f"--parties must be 0 (mixed) or in [2, 6], got {args.parties}")
    if args.jobs < 1:
        raise ValueError(f"--jobs must be at least 1, got {args.jobs}")
    seed = resolve_seed(args.seed)
    worker = partial(_oracle_trial, seed, args.parties, args.atoms)
    trials = range(args.trials)
    if args.jobs == 1:
        records = [worker(trial) for trial in trials]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(worker, trials, chunksize=16))

    with open(args.out, "w", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    finals_plus = np.array([r["final_margin_plus"] for r in records])
    finals_minus = np.array([r["final_margin_minus"] for r in records])
    violations = [r for r in records if not r["ok"]]
    print(f"oracle: {args.trials} trials, seed {seed}, jobs {args.jobs}")
    print(f"  violations: {len(violations)}")
    print(f"  max final margin: {_fmt(max(finals_plus.max(), finals_minus.max()))}")
    print(f"  max chain slack:  {_fmt(max(r['chain_max_slack'] for r in records))}")
    print("  final margin histogram (plus family):")
    for row in _ascii_histogram(finals_plus):
        print(row)
    print(f"  wrote {args.out}")
    if not args.no_plot:
        from . import plotting

        figure = plotting.render_margin_histogram(
            {"plus family": finals_plus, "minus family": finals_minus},
            args.fig_out,
            title=f"final margins over {args.trials} hidden-variable runs",
        )
        print(f"  wrote {figure}")
    return 1 if violations else 0


# --------------------------------------------------------------------- main


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="RNG seed (default: LEGGETT_LAB_SEED or a fixed built-in)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leggett-lab",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlate", help="dual-route correlation table")
    _add_seed(p)
    p.add_argument("--parties", type=int, default=3, help="number of parties (2-6)")
    p.add_argument("--trials", type=int, default=100, help="random angle lists")
    p.add_argument("--out", default="leggett-correlate.csv", help="CSV output path")
    p.set_defaults(handler=cmd_correlate)

    p = sub.add_parser("verify", help="run the derivation checks")
    _add_seed(p)
    p.add_argument(
        "--selftest-break",
        action="store_true",
        help="corrupt one check on purpose to prove the FAIL path works",
    )
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("scan", help="tabulate the closed surface to CSV")
    _add_seed(p)
    p.add_argument("--n-theta", type=int, default=181)
    p.add_argument("--n-phi", type=int, default=45)
    p.add_argument("--n-psi", type=int, default=45)
    p.add_argument("--degrees", action="store_true", help="write angles in degrees")
    p.add_argument("--out", default="leggett-scan.csv", help="CSV output path")
    p.add_argument("--fig-out", default="leggett-scan.png", help="figure output path")
    p.add_argument("--no-plot", action="store_true", help="skip the figure")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("optimize", help="locate the maximal left side")
    _add_seed(p)
    p.add_argument("--branch", choices=("plus", "minus", "both"), default="both")
    p.add_argument("--check", action="store_true", help="exit 1 if off target")
    p.add_argument("--out", default="leggett-optimize.json", help="JSON output path")
    p.add_argument("--fig-out", default="leggett-optimize.png", help="figure output path")
    p.add_argument("--no-plot", action="store_true", help="skip the figure")
    p.set_defaults(handler=cmd_optimize)

    p = sub.add_parser("oracle", help="randomized hidden-variable runs")
    _add_seed(p)
    p.add_argument("--trials", type=int, default=400)
    p.add_argument(
        "--parties", type=int, default=0, help="fixed party count, or 0 for random 2-5"
    )
    p.add_argument(
        "--atoms", type=int, default=0, help="states per mixture, or 0 for random 1-4"
    )
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", default="leggett-oracle.jsonl", help="JSONL output path")
    p.add_argument("--fig-out", default="leggett-oracle.png", help="figure output path")
    p.add_argument("--no-plot", action="store_true", help="skip the figure")
    p.set_defaults(handler=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
