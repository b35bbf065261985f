"""Ranking extraction, rank-correlation scoring, baseline and benchmark harness.

The harness reproduces the synthetic comparison grid: for each cell it
generates random datasets, fits both the multimodal model and the
traditional unimodal Bradley-Terry baseline (all interaction types treated
as equivalent, valence pinned at 1), and scores each inferred ranking
against the ground truth with a squared Spearman rank correlation.

Seeding: instance (cell_index, instance_index) derives its streams from
``SeedSequence(base_seed, spawn_key=(cell_index, instance_index))``, whose
three spawned children seed the data generator, the multimodal fit and the
baseline fit.  Results are therefore independent of scheduling, and
instances within a cell may run in parallel worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from multirank.em import FitConfig, FitResult, _em_loop, fit
from multirank.model import Dataset
from multirank.synthetic import generate_dataset


@dataclass(frozen=True)
class CellConfig:
    """One benchmark cell: dataset shape and the valence sampling interval."""

    m: int
    t: int
    q_min: float
    q_max: float
    n: int = 100


# The canonical comparison grid: M in {5000, 1000}, T in {5, 10}, q ranges
# [0.5, 1], [0.25, 1] and [0, 1], at N = 100.
TABLE1_CELLS: tuple[CellConfig, ...] = tuple(
    CellConfig(m=m, t=t, q_min=q_min, q_max=q_max)
    for m in (5000, 1000)
    for t in (5, 10)
    for (q_min, q_max) in ((0.5, 1.0), (0.25, 1.0), (0.0, 1.0))
)


@dataclass
class BenchmarkCell:
    """Aggregated scores for one cell of the benchmark grid."""

    m: int
    t: int
    q_min: float
    q_max: float
    instances: int
    mean_r2_multimodal: float
    mean_r2_baseline: float
    stderr_multimodal: float
    stderr_baseline: float


def rank_from_strengths(strengths) -> np.ndarray:
    """Indices sorted by strength descending; exact ties by ascending index."""
    strengths = np.asarray(strengths, dtype=np.float64)
    if np.any(strengths <= 0) or not np.all(np.isfinite(strengths)):
        raise ValueError("strengths must be positive and finite")
    return np.argsort(-strengths, kind="stable")


def ranking_to_ranks(ranking: np.ndarray) -> np.ndarray:
    """Convert a best-first index ordering to a 1-based rank per individual."""
    ranks = np.empty(len(ranking), dtype=np.int64)
    ranks[ranking] = np.arange(1, len(ranking) + 1)
    return ranks


def spearman_r2(ranks_a, ranks_b) -> float:
    """Squared Spearman rank correlation between two rank vectors.

    Midranks apply if tied ranks are supplied.  The square makes the metric
    insensitive to a wholesale inversion of either ranking, so the mirror
    degeneracy of the model cannot affect benchmark scores.
    """
    ranks_a = np.asarray(ranks_a, dtype=np.float64)
    ranks_b = np.asarray(ranks_b, dtype=np.float64)
    if ranks_a.shape != ranks_b.shape or ranks_a.ndim != 1:
        raise ValueError("rank vectors must be one-dimensional and equally long")
    if len(ranks_a) < 2:
        raise ValueError("need at least 2 ranks")
    rho = stats.spearmanr(ranks_a, ranks_b).statistic
    return float(rho * rho)


def fit_unimodal_baseline(data: Dataset, config: FitConfig | None = None) -> FitResult:
    """Traditional Bradley-Terry fit treating every interaction type alike.

    Collapses all types to one with the valence pinned at 1 (every winner
    presumed dominant) and runs the same strength machinery, including the
    score prior in MAP mode.
    """
    config = config or FitConfig()
    collapsed = Dataset.from_arrays(
        data.winners,
        data.losers,
        np.zeros(data.n_records, dtype=np.int32),
        n_individuals=data.n_individuals,
        n_types=1,
        individual_labels=data.individual_labels,
        type_labels=("all",),
    )
    return _em_loop(collapsed, config, pin_valences=True)


def _seed_int(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, np.uint64)[0])


def _run_instance(args) -> tuple[int, int, float, float]:
    cell_idx, inst_idx, cell, base_seed = args
    ss = np.random.SeedSequence(base_seed, spawn_key=(cell_idx, inst_idx))
    gen_ss, fit_ss, base_ss = ss.spawn(3)
    truth = generate_dataset(
        cell.n, cell.m, cell.t, cell.q_min, cell.q_max, np.random.default_rng(gen_ss)
    )
    true_ranks = ranking_to_ranks(np.argsort(-truth.true_scores, kind="stable"))

    multi = fit(truth.dataset, FitConfig(seed=_seed_int(fit_ss)))
    base = fit_unimodal_baseline(truth.dataset, FitConfig(seed=_seed_int(base_ss)))
    r2_multi = spearman_r2(ranking_to_ranks(multi.ranking), true_ranks)
    r2_base = spearman_r2(ranking_to_ranks(base.ranking), true_ranks)
    return cell_idx, inst_idx, r2_multi, r2_base


def run_synthetic_benchmark(
    cells=TABLE1_CELLS,
    instances: int = 100,
    base_seed: int = 0,
    jobs: int = 1,
) -> list[BenchmarkCell]:
    """Generate, fit and score ``instances`` datasets per cell.

    Deterministic given ``base_seed`` regardless of ``jobs``: every
    instance owns an independent seeded stream and aggregation follows the
    fixed (cell, instance) order.
    """
    cells = tuple(cells)
    if instances < 1:
        raise ValueError("need at least 1 instance per cell")
    tasks = [
        (ci, ii, cell, base_seed)
        for ci, cell in enumerate(cells)
        for ii in range(instances)
    ]
    r2_multi = np.zeros((len(cells), instances))
    r2_base = np.zeros((len(cells), instances))
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_run_instance, tasks, chunksize=4))
        else:
            results = [_run_instance(task) for task in tasks]
    except Exception as exc:
        raise RuntimeError(f"benchmark failed: {exc}") from exc
    for ci, ii, rm, rb in results:
        r2_multi[ci, ii] = rm
        r2_base[ci, ii] = rb

    out = []
    for ci, cell in enumerate(cells):
        se_m = float(r2_multi[ci].std(ddof=1) / np.sqrt(instances)) if instances > 1 else 0.0
        se_b = float(r2_base[ci].std(ddof=1) / np.sqrt(instances)) if instances > 1 else 0.0
        out.append(
            BenchmarkCell(
                m=cell.m,
                t=cell.t,
                q_min=cell.q_min,
                q_max=cell.q_max,
                instances=instances,
                mean_r2_multimodal=float(r2_multi[ci].mean()),
                mean_r2_baseline=float(r2_base[ci].mean()),
                stderr_multimodal=se_m,
                stderr_baseline=se_b,
            )
        )
    return out


def benchmark_table_csv(cells: list[BenchmarkCell]) -> str:
    """The benchmark results as a CSV document."""
    lines = ["m,t,q_min,q_max,instances,r2_multi,r2_base,se_multi,se_base"]
    for c in cells:
        lines.append(
            f"{c.m},{c.t},{c.q_min:g},{c.q_max:g},{c.instances},"
            f"{c.mean_r2_multimodal:.6f},{c.mean_r2_baseline:.6f},"
            f"{c.stderr_multimodal:.6f},{c.stderr_baseline:.6f}"
        )
    return "\n".join(lines) + "\n"


def benchmark_table_text(cells: list[BenchmarkCell]) -> str:
    """An aligned text table, multimodal/baseline per q-range column."""
    ranges = sorted({(c.q_min, c.q_max) for c in cells}, key=lambda r: -r[0])
    shapes = sorted({(c.m, c.t) for c in cells}, key=lambda s: (-s[0], s[1]))
    by_key = {((c.m, c.t), (c.q_min, c.q_max)): c for c in cells}
    header = ["   M   T"] + [f"{q_min:g}<=q<={q_max:g}".rjust(12) for q_min, q_max in ranges]
    lines = ["Spearman R^2, multimodal/unimodal baseline", "".join(header)]
    for shape in shapes:
        row = [f"{shape[0]:>4} {shape[1]:>3}"]
        for rng_ in ranges:
            c = by_key.get((shape, rng_))
            row.append(
                f"{c.mean_r2_multimodal:.2f}/{c.mean_r2_baseline:.2f}".rjust(12)
                if c
                else " " * 12
            )
        lines.append("".join(row))
    return "\n".join(lines) + "\n"
