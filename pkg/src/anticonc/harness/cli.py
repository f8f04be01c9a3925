"""Command-line entry point.

Exit status: 0 on success, 1 when a checked inequality or round-trip fails,
2 on bad usage or invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from ..distribution import inner_product_distribution
from ..domain import VectorSet, hypercube, read_two_cube, read_vector_set, render_two_cube, render_vector_set
from ..encoding import AdjacentEncoder, Budget, J_sizes, MemberEncoder, all_directions
from ..errors import AntiConcError, HypothesisFailed
from ..fourier import lemma_tech_check, parseval_gap, star_bound
from ..structure import structure_profile
from .config import ExperimentConfig
from .experiments import prob_view, run_theorem1_experiment, run_theorem2_experiment
from .generators import KINDS, GeneratorSpec, generate, random_b
from .verify import SUITES, verify

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    cfg = ExperimentConfig()
    parser.add_argument("--n", type=int, default=d(cfg.n), help="dimension")
    parser.add_argument("--beta", type=float, default=d(cfg.beta), help="log2|B| / n for random B")
    parser.add_argument("--delta", type=float, default=d(cfg.delta))
    parser.add_argument("--bigC", type=float, default=d(cfg.C), help="threshold constant: C / sqrt(n)")
    parser.add_argument("--lambda", dest="lam", type=float, default=d(cfg.lam))
    parser.add_argument("--seed", type=int, default=d(cfg.seed))
    parser.add_argument("--set-file", default=d(None), help="vector set, one +/- string per line")
    parser.add_argument("--cube-file", default=d(None), help="two-cube, one 'u v' pair per line")
    parser.add_argument("--format", choices=("csv", "json"), default=d(cfg.output_format))
    parser.add_argument("--theta-nodes", type=int, default=d(None))
    parser.add_argument("--ell-max", type=int, default=d(cfg.ell_max))
    parser.add_argument("--budget", type=int, default=d(cfg.enumeration_budget), help="max enumerated directions")
    parser.add_argument("--workers", type=int, default=d(cfg.workers))
    parser.add_argument("--instances", type=int, default=d(cfg.instances))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anticonc", description="Exact anti-concentration experiments.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    p = sub.add_parser("conc", parents=[common], help="pmf and concentration of <x, Y>")
    p.add_argument("--x", help="comma-separated integer direction (default all ones)")

    sub.add_parser("census", parents=[common], help="direction census and exceed counts")

    p = sub.add_parser("fourier", parents=[common], help="Fourier bound and product inequality for one x")
    p.add_argument("--x", help="comma-separated integer direction (default all ones)")
    p.add_argument("--eta", type=float, default=0.9)

    p = sub.add_parser("structure", parents=[common], help="zero-sum counts, Sidon class, derived bounds")
    p.add_argument("--kind", choices=KINDS[2:], default="distinct_cube")

    p = sub.add_parser("encode-test", parents=[common], help="exhaustive encoding round-trips for one B")
    p.add_argument("--eta", type=float, default=0.9)

    p = sub.add_parser("scaling", parents=[common], help="log-log fit of median concentration over n")
    p.add_argument("--kind", choices=KINDS[2:], default="distinct_cube")
    p.add_argument("--n-values", default="8,10,12,14,16,18,20")
    p.add_argument("--random-b", action="store_true", help="random B of density beta instead of the full cube")

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", help=" | ".join(SUITES))

    p = sub.add_parser("gen", parents=[common], help="emit a generated instance")
    p.add_argument("kind", choices=KINDS)
    return parser


def _config(args) -> ExperimentConfig:
    return ExperimentConfig(
        n=args.n, beta=args.beta, delta=args.delta, C=args.bigC, lam=args.lam, seed=args.seed,
        theta_nodes=args.theta_nodes, ell_max=args.ell_max, enumeration_budget=args.budget,
        output_format=args.format, instances=args.instances, workers=args.workers,
    )


def _set(args, cfg: ExperimentConfig) -> VectorSet:
    if args.set_file:
        return read_vector_set(args.set_file)
    return random_b(cfg.n, cfg.beta, np.random.default_rng(cfg.seed))


def _direction(text: str | None, n: int) -> list[int]:
    if text is None:
        return [1] * n
    return [int(t) for t in text.split(",")]


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(obj, fmt: str, csv_text: str | None = None) -> None:
    if fmt == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def cmd_conc(args, cfg) -> int:
    B = _set(args, cfg)
    x = _direction(args.x, B.n)
    dist = inner_product_distribution(x, B)
    conc, k = dist.max_mass()
    obj = {
        "n": B.n, "set_size": len(B), "x": x,
        "concentration": prob_view(conc), "argmax": k,
        "pmf": {str(v): prob_view(p) for v, p in dist.as_dict().items()},
    }
    rows = [(v, p.numerator, p.denominator, float(p)) for v, p in dist.as_dict().items()]
    _emit(obj, cfg.output_format, _rows_csv(["k", "num", "den", "float"], rows))
    return EXIT_OK


def cmd_census(args, cfg) -> int:
    B = _set(args, cfg)
    A = read_two_cube(args.cube_file) if args.cube_file else hypercube(B.n)
    cfg = ExperimentConfig(**{**cfg.as_dict(), "n": B.n})
    report = run_theorem1_experiment(cfg, B=B, A=A)
    _emit(report.as_dict(), cfg.output_format, report.to_csv())
    return EXIT_OK


def cmd_fourier(args, cfg) -> int:
    B = _set(args, cfg)
    x = _direction(args.x, B.n)
    conc, _ = inner_product_distribution(x, B).max_mass()
    sb = star_bound(x, B, cfg.theta_nodes)
    tech = lemma_tech_check(x, B, args.eta)
    obj = {
        "concentration": prob_view(conc),
        "fourier_mean": sb.value, "quadrature_error": sb.quadrature_error, "nodes": sb.nodes,
        "fourier_bound_holds": float(conc) <= sb.value + 1e-9,
        "parseval_gap": parseval_gap(x, B),
        "product_bound": {"lhs": tech.lhs, "rhs": tech.rhs, "margin": tech.margin, "holds": tech.holds()},
    }
    rows = [("fourier_mean", float(conc), sb.value), ("product_bound", tech.lhs, tech.rhs)]
    _emit(obj, cfg.output_format, _rows_csv(["check", "lhs", "rhs"], rows))
    ok = obj["fourier_bound_holds"] and tech.holds()
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_structure(args, cfg) -> int:
    A = read_two_cube(args.cube_file) if args.cube_file else generate(GeneratorSpec(args.kind, cfg.n))
    prof = structure_profile(A, cfg.C, cfg.ell_max, cfg.nu_grid_size)
    if cfg.output_format == "csv":
        sys.stdout.write(_rows_csv(["ell", "r_ell", "R"], [(ell, prof.r[ell], prof.R_values[ell]) for ell in sorted(prof.r)]))
    else:
        sys.stdout.write(prof.to_json() + "\n")
    return EXIT_OK


def cmd_encode_test(args, cfg) -> int:
    B = _set(args, cfg)
    budget = Budget.for_set(B, max(cfg.lam, 1.01 / B.n))
    y_total = y_ok = 0
    enc = MemberEncoder(B, budget)
    for y in B.signs:
        try:
            code = enc.encode(y)
        except HypothesisFailed:
            continue
        y_total += 1
        y_ok += enc.decode(code) == tuple(int(e) for e in y)
    x_total = x_ok = 0
    eligible = np.flatnonzero(J_sizes(B, budget.kappa) > budget.t_y_raw)
    if eligible.size and (1 << B.n) <= cfg.enumeration_budget:
        aenc = AdjacentEncoder(B, B.signs[int(eligible[0])], args.eta, budget)
        X = all_directions(B.n)
        codes = aenc.encode_many(X)
        keep = [i for i, c in enumerate(codes) if c is not None]
        back = aenc.decode_many([codes[i] for i in keep])
        x_total = len(keep)
        x_ok = sum(b == tuple(int(e) for e in X[i]) for i, b in zip(keep, back))
    obj = {"y_roundtrips": y_total, "y_identity": y_ok, "x_roundtrips": x_total, "x_identity": x_ok,
           "kappa": budget.kappa, "tau": budget.tau, "t_y": budget.t_y, "s": budget.s,
           "members_with_large_J": int(eligible.size)}
    if y_total == 0 and x_total == 0:
        obj["note"] = "no input met either encoding's hypothesis; try a smaller --lambda"
    _emit(obj, cfg.output_format, _rows_csv(["side", "total", "identity"], [("y", y_total, y_ok), ("x", x_total, x_ok)]))
    return EXIT_OK if (y_ok == y_total and x_ok == x_total) else EXIT_VIOLATION


def cmd_scaling(args, cfg) -> int:
    ns = [int(t) for t in args.n_values.split(",")]
    report = run_theorem2_experiment(cfg, args.kind, ns, b_kind="random" if args.random_b else "full")
    _emit(report.as_dict(), cfg.output_format, report.to_csv())
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    report = verify(args.suite, cfg)
    if cfg.output_format == "csv":
        rows = [(c.name, c.instances, c.violations, c.worst_margin, c.passed) for c in report.checks]
        sys.stdout.write(_rows_csv(["check", "instances", "violations", "worst_margin", "passed"], rows))
    else:
        sys.stdout.write(report.to_json() + "\n")
    for line in report.violation_lines():
        sys.stderr.write(line + "\n")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_gen(args, cfg) -> int:
    out = generate(GeneratorSpec(args.kind, cfg.n, {"beta": cfg.beta}), cfg.seed)
    if isinstance(out, tuple):
        A, B = out
        sys.stdout.write("# A\n" + render_vector_set(A) + "# B\n" + render_vector_set(B))
    elif isinstance(out, VectorSet):
        sys.stdout.write(render_vector_set(out))
    else:
        sys.stdout.write(render_two_cube(out))
    return EXIT_OK


COMMANDS = {
    "conc": cmd_conc, "census": cmd_census, "fourier": cmd_fourier, "structure": cmd_structure,
    "encode-test": cmd_encode_test, "scaling": cmd_scaling, "verify": cmd_verify, "gen": cmd_gen,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (AntiConcError, ValueError, OSError) as exc:
        sys.stderr.write(f"anticonc: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
