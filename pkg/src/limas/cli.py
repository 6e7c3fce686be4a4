"""Command line front end: analyze, simulate and oracle subcommands.

Exit codes for ``analyze``: 0 the model is certified consensusable (a gain
was produced and verified), 2 certified not consensusable (the necessary
condition fails), 3 inconclusive, 1 input or validation error. The other
subcommands use 0 for success and 1 for errors. Identical inputs and seeds
produce byte-identical JSON and CSV outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, oracle
from .errors import (
    AssumptionViolated,
    Divergence,
    LimasError,
    NotCommuting,
    DegenerateSpectrum,
    NotControllable,
    Overflow,
    SynthesisFailed,
)
from .model_io import gain_from_file, load_model
from .simulator import (
    SETTLING_THRESHOLD,
    convergence_metrics,
    initial_state,
    simulate,
)

EXIT_CONSENSUSABLE = 0
EXIT_ERROR = 1
EXIT_NOT_CONSENSUSABLE = 2
EXIT_INCONCLUSIVE = 3

_VERDICT_EXIT = {
    "consensusable": EXIT_CONSENSUSABLE,
    "not-consensusable": EXIT_NOT_CONSENSUSABLE,
    "inconclusive": EXIT_INCONCLUSIVE,
}


def _fmt_list(values, digits: int = 6) -> str:
    return "[" + ", ".join(f"{v:.{digits}g}" for v in values) + "]"


def render_text(report: analysis.AnalysisReport) -> str:
    """Plain-text rendering of an analysis report."""
    lines = [
        f"model: N = {report.N} agents, state dimension n = {report.n}",
        f"lambda_p (sorted): {_fmt_list(report.lambda_p)}",
        f"lambda_c (sorted): {_fmt_list(report.lambda_c)}",
    ]
    for label, chk in (
        ("commuting Laplacians   ", report.assumption_commuting),
        ("modal controllability  ", report.assumption_controllability),
        ("proportional coupling  ", report.assumption_coupling),
    ):
        status = "pass" if chk.holds else "FAIL"
        extra = f"  ({chk.detail})" if chk.detail else ""
        lines.append(f"assumption {label}[{status}]  residual {chk.residual:.3g}{extra}")
    if report.alpha is not None:
        lines.append(f"coupling ratio alpha: {report.alpha:.6g}")

    if report.sufficient is not None:
        s = report.sufficient
        lines.append(
            f"sufficient condition: {'holds' if s.holds else 'does not hold'} "
            f"(lhs {s.lhs:.6g} vs rhs {s.rhs:.6g}, sigma_c {s.sigma_c:.6g}, "
            f"k* {s.k_star:.6g})")
    else:
        lines.append(f"sufficient condition: unavailable ({report.sufficient_error})")
    if report.necessary is not None:
        c = report.necessary
        lines.append(
            f"necessary condition: {'holds' if c.holds else 'FAILS'} "
            f"(gamma_c {c.gamma_c:.6g}, lhs {c.lhs:.6g} < rhs {c.rhs:.6g})")
    else:
        lines.append(f"necessary condition: unavailable ({report.necessary_error})")
    if report.scalar is not None:
        sc = report.scalar
        lines.append(
            f"scalar conditions: C1 {sc.c1}, C2 {sc.c2}, "
            f"K+ ({sc.k_plus[0]:.6g}, {sc.k_plus[1]:.6g}), "
            f"K- ({sc.k_minus[0]:.6g}, {sc.k_minus[1]:.6g}), "
            f"necessary {'holds' if sc.necessary else 'FAILS'}")

    if report.gain is not None:
        lines.append(f"gain K: {_fmt_list(report.gain)}  (source: {report.gain_source})")
    elif report.synthesis_error:
        lines.append(f"gain: none ({report.synthesis_error})")
    if report.modal_radii is not None:
        lines.append(
            f"modal radii: {_fmt_list(report.modal_radii)}  "
            f"(max {max(report.modal_radii):.6g})")
    if report.certificate_method is not None:
        lines.append(
            f"certificate: {report.certificate_method}, "
            f"max radius {report.certified_radius:.6g}")
    lines.append(f"verdict: {report.verdict.upper()}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    model = load_model(args.model)
    report = analysis.analyze(
        model,
        commute_rtol=args.tol_commute,
        rank_rtol=args.tol_rank,
        mare_q=args.mare_q,
        mare_max_iter=args.mare_max_iter,
    )
    if (not report.consensusable_certified and report.gain is not None
            and report.modal_radii is None):
        # Scalar gain without commuting Laplacians: certify by direct
        # projection of the stacked loop instead of modal radii.
        check = oracle.verify_gain(model, [report.gain])
        report.certify("projected-radius", check.max_radius)

    payload = json.dumps(report.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    print(payload if args.format == "json" else render_text(report))
    return _VERDICT_EXIT[report.verdict]


def _auto_gain(model, args):
    spec = model.spectral_pair(commute_rtol=args.tol_commute)
    sufficient = analysis.sufficient_check(model, spec,
                                           rank_rtol=args.tol_rank,
                                           commute_rtol=args.tol_commute)
    synth = analysis.synthesize_gain(model, spec, sufficient=sufficient,
                                     mare_q=args.mare_q,
                                     mare_max_iter=args.mare_max_iter,
                                     rank_rtol=args.tol_rank,
                                     commute_rtol=args.tol_commute)
    return synth.K


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    if args.gain:
        K = gain_from_file(args.gain, model.n)
    else:
        try:
            K = _auto_gain(model, args)
        except (AssumptionViolated, NotCommuting, DegenerateSpectrum,
                SynthesisFailed, Divergence, NotControllable) as exc:
            raise SynthesisFailed(f"automatic gain synthesis failed: {exc}") from exc

    x0 = initial_state(model, args.seed)
    try:
        traj = simulate(model, K, x0, args.steps, seed=args.seed)
    except Overflow as exc:
        print(f"error: state overflow at step {exc.step} "
              f"(closed loop is unstable)", file=sys.stderr)
        return EXIT_ERROR

    header = (["step"]
              + [f"delta_norm_{i + 1}" for i in range(model.N)]
              + [f"xbar_{j + 1}" for j in range(model.n)])
    rows = [",".join(header)]
    for t in range(traj.step_count + 1):
        cells = [str(t)]
        cells += [f"{v:.17g}" for v in traj.delta_norms[t]]
        cells += [f"{v:.17g}" for v in traj.xbar[t]]
        rows.append(",".join(cells))
    Path(args.out_csv).write_text("\n".join(rows) + "\n", encoding="utf-8")

    metrics = convergence_metrics(traj, threshold=args.threshold)
    settled = ("never" if metrics.settling_step is None
               else f"step {metrics.settling_step}")
    print(f"gain K: {_fmt_list(K.ravel())}")
    print(f"seed {args.seed}, {args.steps} steps -> {args.out_csv}")
    print(f"decay rate {metrics.rate:.6g}, settled below "
          f"{args.threshold:g}: {settled}"
          + (" [no decay]" if metrics.no_decay else ""))
    return 0


def cmd_oracle(args) -> int:
    model = load_model(args.model)
    if args.gain:
        K = gain_from_file(args.gain, model.n)
        res = oracle.verify_gain(model, K)
        out = {
            "mode": "verify",
            "K": [float(v) for v in K.ravel()],
            "stable": res.stable,
            "max_radius": res.max_radius,
        }
    else:
        result = oracle.scalar_model_grid_search(model, lo=args.lo, hi=args.hi,
                                                 count=args.count)
        out = {
            "mode": "grid",
            "grid": {"lo": result.lo, "hi": result.hi, "count": result.count},
            "stabilizing_count": int(result.stabilizing_k.size),
            "stabilizing_intervals": [list(iv) for iv in result.stabilizing_intervals()],
            "best_k": result.best_k,
            "best_radius": result.best_radius,
        }
    payload = json.dumps(out, indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    print(payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limas",
        description="Consensusability analysis, gain synthesis and simulation "
                    "for interconnected multi-agent systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tolerances(p):
        p.add_argument("--tol-commute", type=float, default=analysis.COMMUTE_RTOL,
                       help="relative tolerance for the Laplacian commutator")
        p.add_argument("--tol-rank", type=float, default=analysis.RANK_RTOL,
                       help="relative singular-value threshold for rank tests")
        p.add_argument("--mare-q", type=float, default=analysis.MARE_Q_SCALE,
                       help="scale of the identity regularizer in the Riccati recursion")
        p.add_argument("--mare-max-iter", type=int, default=analysis.MARE_MAX_ITER,
                       help="iteration cap for the Riccati fixed point")

    p = sub.add_parser("analyze", help="run the consensusability analysis")
    p.add_argument("model", help="path to a JSON model file")
    add_tolerances(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="also write the JSON report to this path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="simulate the closed loop and write CSV")
    p.add_argument("model", help="path to a JSON model file")
    add_tolerances(p)
    p.add_argument("--gain", help="JSON gain file {\"K\": [...]}; omit to synthesize")
    p.add_argument("--seed", type=int, default=42, help="seed for the initial state")
    p.add_argument("--steps", type=int, default=300, help="number of updates")
    p.add_argument("--threshold", type=float, default=SETTLING_THRESHOLD,
                   help="settling threshold on the worst agent deviation")
    p.add_argument("--out-csv", required=True, help="trajectory CSV output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="brute-force gain search / verification")
    p.add_argument("model", help="path to a JSON model file")
    p.add_argument("--gain", help="verify this JSON gain file instead of searching")
    p.add_argument("--lo", type=float, default=oracle.GRID_LO)
    p.add_argument("--hi", type=float, default=oracle.GRID_HI)
    p.add_argument("--count", type=int, default=oracle.GRID_COUNT)
    p.add_argument("--out", help="also write the JSON result to this path")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LimasError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
