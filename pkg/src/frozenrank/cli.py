"""Command-line interface.

Subcommands: ``analytic`` (limit-curve CSV), ``simulate`` (Monte Carlo rank
trials), ``census`` (perturbed variable-type censuses), ``ks`` (leaf-removal
statistics), ``classify`` (rank/frozen/type report for a matrix file) and
``verify`` (invariant suites).  Outputs go to ``--out`` or stdout.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import analytic
from .errors import ResourceCapError
from .exactla import classify_variable, frozen_set, parse_matrix, type_census
from .field import FieldSpec
from .harness import CSV_SCHEMA_TAG, ExperimentConfig, records_to_csv, run_census, run_experiment
from .prf import TAG_EDGES, TAG_TRIAL, TAG_WEIGHTS, derive_seed
from .randgraph import CouplingSource, WeightTemplate, karp_sipser, parse_graph, sample_graph
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _write_output(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)


def _frange(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("--step must be positive")
    if hi < lo:
        raise ValueError("--d-max must be at least --d-min")
    values = []
    k = 0
    while True:
        d = lo + k * step
        if d > hi + 1e-12:
            break
        values.append(round(d, 12))
        k += 1
    return values


def _cmd_analytic(args) -> int:
    buf = io.StringIO()
    buf.write(CSV_SCHEMA_TAG + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "d", "alpha_star_lo", "alpha_zero", "alpha_star_hi",
        "min_R", "gamma_lo", "gamma_hi", "integral_residual",
    ])
    for d in _frange(args.d_min, args.d_max, args.step):
        pt = analytic.solve_point(d)
        writer.writerow([
            d, pt.alpha_star_lo, pt.alpha_zero, pt.alpha_star_hi,
            pt.min_R, pt.gamma_lo, pt.gamma_hi,
            analytic.integral_identity_residual(d),
        ])
    _write_output(buf.getvalue(), args.out)
    return EXIT_OK


def _config_from_args(args, census: bool) -> ExperimentConfig:
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fp:
            return ExperimentConfig.from_json(fp.read())
    required = ["n", "d", "trials"]
    missing = [k for k in required if getattr(args, k, None) is None]
    if missing:
        raise ValueError(f"missing required flags: {', '.join('--' + k for k in missing)}")
    return ExperimentConfig(
        n=args.n,
        d=args.d,
        field=args.field,
        trials=args.trials,
        master_seed=args.seed,
        template=args.template,
        pert_P=getattr(args, "P", None),
        pert_seed=getattr(args, "pert_seed", None),
        census=census,
        output=None,
        workers=args.workers,
    )


def _cmd_simulate(args) -> int:
    cfg = _config_from_args(args, census=False)
    records, summary = run_experiment(cfg)
    out = args.out or cfg.output
    _write_output(records_to_csv(records), out)
    if out:
        sys.stdout.write(summary.to_json() + "\n")
    return EXIT_OK


def _cmd_census(args) -> int:
    cfg = _config_from_args(args, census=True)
    records, summary = run_census(cfg)
    out = args.out or cfg.output
    _write_output(records_to_csv(records), out)
    if out:
        sys.stdout.write(summary.to_json() + "\n")
    return EXIT_OK


def _cmd_ks(args) -> int:
    if args.graph:
        with open(args.graph, encoding="utf-8") as fp:
            G = parse_graph(fp.read())
        ks = karp_sipser(G)
        payload = {
            "n": G.n,
            "edges": G.edge_count,
            "isolated_count": ks.isolated_count,
            "core_size": len(ks.core_vertices),
            "core_vertices": list(ks.core_vertices),
            "removed_pairs": [list(p) for p in ks.removed_pairs],
        }
        _write_output(json.dumps(payload, indent=2) + "\n", args.out)
        return EXIT_OK
    if args.n is None or args.d is None or args.trials is None:
        raise ValueError("ks needs either --graph or all of --n/--d/--trials")
    buf = io.StringIO()
    buf.write(CSV_SCHEMA_TAG + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial_index", "derived_seed", "n", "d",
                     "ks_isolated", "ks_core_size", "removed_pair_count"])
    field = FieldSpec.parse_label(args.field)
    for index in range(args.trials):
        trial_seed = derive_seed(args.seed, index, TAG_TRIAL)
        coupling = CouplingSource(derive_seed(trial_seed, 0, TAG_EDGES))
        template = WeightTemplate(field, args.n, args.template,
                                  derive_seed(trial_seed, 0, TAG_WEIGHTS))
        ks = karp_sipser(sample_graph(args.n, args.d / args.n, template, coupling))
        writer.writerow([index, trial_seed, args.n, args.d,
                         ks.isolated_count, len(ks.core_vertices),
                         len(ks.removed_pairs)])
    _write_output(buf.getvalue(), args.out)
    return EXIT_OK


def _cmd_classify(args) -> int:
    with open(args.matrix, encoding="utf-8") as fp:
        A = parse_matrix(fp.read())
    profile = type_census(A) if min(A.m, A.n) > 0 else None
    payload = {
        "m": A.m,
        "n": A.n,
        "field": A.field.label(),
        "rank": A.rank(),
        "nullity": A.nullity(),
        "frozen_columns": list(frozen_set(A).frozen),
        "types": {str(i): classify_variable(A, i) for i in range(min(A.m, A.n))},
    }
    if profile is not None:
        payload["census"] = {
            "x": profile.x, "y": profile.y, "z": profile.z,
            "u": profile.u, "v": profile.v,
            "alpha": profile.alpha, "alpha_hat": profile.alpha_hat,
        }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_suite(args.suite)
    payload = [r.as_dict() for r in results]
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    failed = [r for r in results if not r.passed]
    for r in results:
        sys.stderr.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}\n")
    return EXIT_CHECK_FAILURE if failed else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frozenrank",
        description="Exact ranks, frozen variables and type censuses of sparse "
                    "weighted symmetric random matrices, with the analytic limit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="limit-curve CSV over a degree grid")
    p.add_argument("--d-min", type=float, required=True)
    p.add_argument("--d-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_analytic)

    def add_common(p, with_P=False):
        p.add_argument("--config", help="JSON config file (overrides flags)")
        p.add_argument("--n", type=int)
        p.add_argument("--d", type=float)
        p.add_argument("--field", default="F2", help='"F2", "Fp:<p>" or "Q"')
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--template", choices=("allones", "random"), default="allones")
        p.add_argument("--workers", type=int, default=1)
        if with_P:
            p.add_argument("--P", "--pert-P", dest="P", type=int,
                           help="perturbation dimension bound")
            p.add_argument("--pert-seed", dest="pert_seed", type=int,
                           help="separate seed for the perturbation streams")
        p.add_argument("--out")

    p = sub.add_parser("simulate", help="Monte Carlo rank trials")
    add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("census", help="perturbed variable-type censuses")
    add_common(p, with_P=True)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("ks", help="leaf-removal statistics")
    p.add_argument("--graph", help="edge-list file to reduce instead of sampling")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", default="F2")
    p.add_argument("--template", choices=("allones", "random"), default="allones")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ks)

    p = sub.add_parser("classify", help="rank/frozen/type report for a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceCapError as exc:
        sys.stderr.write(f"resource cap: {exc}\n")
        return EXIT_RESOURCE
    except (ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
