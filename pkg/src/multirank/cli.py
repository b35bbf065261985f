"""Command-line interface.

Subcommands: ``fit`` (estimate a ranking from an interaction CSV),
``simulate`` (generate synthetic data with a truth sidecar), ``benchmark``
(the synthetic comparison grid) and ``compare`` (multimodal vs unimodal
rankings for one dataset).  Exit codes: 0 success, 2 input error, 3
non-convergence (results still written), 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import os
import sys
from pathlib import Path

import numpy as np

from multirank import __version__
from multirank.benchmark import (
    TABLE1_CELLS,
    benchmark_table_csv,
    benchmark_table_text,
    fit_unimodal_baseline,
    rank_from_strengths,
    ranking_to_ranks,
    run_synthetic_benchmark,
)
from multirank.em import FitConfig, fit
from multirank.io import (
    InteractionParseError,
    parse_interactions,
    serialize_interactions,
    write_fit_result,
    write_truth,
)
from multirank.synthetic import generate_dataset

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_CONVERGENCE = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="multirank", description=__doc__)
    parser.add_argument("--version", action="version", version=f"multirank {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_fit = sub.add_parser("fit", help="fit the multimodal ranking model to an interaction CSV")
    p_fit.add_argument("interactions", help="interaction CSV (header winner,loser,type)")
    p_fit.add_argument("--mode", choices=["ml", "map"], default="map")
    p_fit.add_argument("--tol", type=float, default=1e-8, help="outer convergence tolerance")
    p_fit.add_argument("--max-iter", type=int, default=10000, help="outer iteration cap")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--flip", action="store_true", help="invert the final orientation")
    p_fit.add_argument("--out", default="fit_result.json", help="output JSON path")

    p_sim = sub.add_parser("simulate", help="generate a synthetic dataset with ground truth")
    p_sim.add_argument("--n", type=int, required=True, help="number of individuals")
    p_sim.add_argument("--m", type=int, required=True, help="number of interactions")
    p_sim.add_argument("--types", type=int, required=True, help="number of interaction types")
    p_sim.add_argument("--qmin", type=float, default=0.0)
    p_sim.add_argument("--qmax", type=float, default=1.0)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out-prefix", default="synthetic", help="writes PREFIX.csv and PREFIX.truth.json")

    p_bench = sub.add_parser("benchmark", help="run the synthetic comparison grid")
    p_bench.add_argument("--instances", type=int, default=100)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", default="benchmark.csv", help="output CSV path")
    p_bench.add_argument(
        "--jobs", type=int, default=max(1, os.cpu_count() or 1),
        help="parallel worker processes (results are identical for any value)",
    )

    p_cmp = sub.add_parser("compare", help="fit multimodal and unimodal models, write paired rankings")
    p_cmp.add_argument("interactions")
    p_cmp.add_argument("--mode", choices=["ml", "map"], default="map")
    p_cmp.add_argument("--tol", type=float, default=1e-8)
    p_cmp.add_argument("--max-iter", type=int, default=10000)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--out", default="compare.csv", help="output CSV path")
    return parser


def _load_dataset(path: str):
    try:
        return parse_interactions(path)
    except (InteractionParseError, ValueError, OSError) as exc:
        print(f"multirank: {exc}", file=sys.stderr)
        return None


def _cmd_fit(args) -> int:
    data = _load_dataset(args.interactions)
    if data is None:
        return EXIT_INPUT
    config = FitConfig(mode=args.mode, outer_tol=args.tol, max_outer_iters=args.max_iter, seed=args.seed)
    try:
        result = fit(data, config)
    except ValueError as exc:
        print(f"multirank: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.flip:
        result.params = result.params.flipped()
        result.scores = result.params.scores
        result.ranking = rank_from_strengths(result.params.strengths)
        result.oriented_flipped = not result.oriented_flipped
    write_fit_result(result, data, args.out)
    if not result.converged:
        print(
            f"multirank: no convergence after {result.outer_iterations} iterations; "
            f"partial result written to {args.out}",
            file=sys.stderr,
        )
        return EXIT_NO_CONVERGENCE
    print(f"fit converged in {result.outer_iterations} iterations; wrote {args.out}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    try:
        truth = generate_dataset(
            args.n, args.m, args.types, args.qmin, args.qmax, np.random.default_rng(args.seed)
        )
    except ValueError as exc:
        print(f"multirank: {exc}", file=sys.stderr)
        return EXIT_INPUT
    csv_path = Path(f"{args.out_prefix}.csv")
    truth_path = Path(f"{args.out_prefix}.truth.json")
    csv_path.write_text(serialize_interactions(truth.dataset), encoding="utf-8")
    write_truth(truth, truth_path)
    print(f"wrote {csv_path} and {truth_path}")
    return EXIT_OK


def _cmd_benchmark(args) -> int:
    if args.instances < 1 or args.jobs < 1:
        print("multirank: --instances and --jobs must be positive", file=sys.stderr)
        return EXIT_INPUT
    cells = run_synthetic_benchmark(
        TABLE1_CELLS, instances=args.instances, base_seed=args.seed, jobs=args.jobs
    )
    Path(args.out).write_text(benchmark_table_csv(cells), encoding="utf-8")
    print(benchmark_table_text(cells), end="")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    data = _load_dataset(args.interactions)
    if data is None:
        return EXIT_INPUT
    config = FitConfig(mode=args.mode, outer_tol=args.tol, max_outer_iters=args.max_iter, seed=args.seed)
    try:
        multi = fit(data, config)
        base = fit_unimodal_baseline(data, config)
    except ValueError as exc:
        print(f"multirank: {exc}", file=sys.stderr)
        return EXIT_INPUT
    ranks_multi = ranking_to_ranks(multi.ranking)
    ranks_base = ranking_to_ranks(base.ranking)
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ("label", "score_multimodal", "rank_multimodal", "score_unimodal", "rank_unimodal")
    )
    for u in range(data.n_individuals):
        writer.writerow(
            (
                data.individual_labels[u],
                repr(float(multi.scores[u])),
                int(ranks_multi[u]),
                repr(float(base.scores[u])),
                int(ranks_base[u]),
            )
        )
    Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    print(f"wrote {args.out}")
    if not (multi.converged and base.converged):
        print("multirank: at least one fit did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    handlers = {
        "fit": _cmd_fit,
        "simulate": _cmd_simulate,
        "benchmark": _cmd_benchmark,
        "compare": _cmd_compare,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
