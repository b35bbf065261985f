"""The EM fitting loop.

Alternates an E-step (posterior responsibilities pi_r that the winner of
each record is the dominant party) with M-step updates of the valence
probabilities (per-type responsibility means) and of the strengths (a
Zermelo-style fixed-point iteration run to convergence, in either its
maximum-likelihood or its MAP form with a logistic prior on the scores).
ML mode renormalizes the strengths to geometric mean one inside the loop;
both modes resolve the exact mirror symmetry (lambda -> 1/lambda,
q -> 1 - q) with a single orientation pass at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from multirank import backend
from multirank.model import (
    CountMatrix,
    Dataset,
    ModelParams,
    count_matrix,
)


class Mode(str, Enum):
    ML = "ml"
    MAP = "map"


@dataclass
class Responsibilities:
    """Per-record posterior probabilities that the winner is dominant."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("responsibilities must be one-dimensional")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise ValueError("responsibilities must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class FitConfig:
    """Knobs for the EM loop.

    ``outer_tol`` applies to max |delta s_u| and max |delta q_t| between
    outer iterations; ``inner_tol`` to the max relative strength change
    between fixed-point sweeps.  ``init_score_spread`` is the standard
    deviation of the random initial scores (initialization must break the
    mirror symmetry, so the exact symmetric point is never used).
    """

    mode: Mode = Mode.MAP
    outer_tol: float = 1e-8
    inner_tol: float = 1e-10
    max_outer_iters: int = 10000
    max_inner_iters: int = 1000
    seed: int = 0
    init_score_spread: float = 0.1

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.outer_tol <= 0 or self.inner_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise ValueError("iteration caps must be at least 1")
        if self.init_score_spread <= 0:
            raise ValueError("init_score_spread must be positive")


@dataclass
class FitResult:
    """Converged parameters plus ranking and diagnostics.

    ``ranking`` lists individual indices best first (ties by ascending
    index).  ``objective_trace`` holds the mode-appropriate objective
    (marginal log-likelihood for ML, log-posterior for MAP) at the start of
    every outer iteration plus the final parameters; it is non-decreasing
    up to floating-point slack.  ``oriented_flipped`` records whether the
    final orientation pass inverted the fit.
    """

    params: ModelParams
    scores: np.ndarray
    ranking: np.ndarray
    objective_trace: np.ndarray
    converged: bool
    outer_iterations: int
    oriented_flipped: bool
    mode: Mode
    empty_types: tuple[int, ...] = ()
    strength_saturated: bool = False


def _ranking(strengths: np.ndarray) -> np.ndarray:
    # stable argsort of the negated strengths: ties fall back to index order
    return np.argsort(-strengths, kind="stable")


def e_step(data: Dataset, params: ModelParams) -> Responsibilities:
    """Posterior probability per record that the winner is the dominant party.

    pi_r = lam_u q_t / (lam_u q_t + lam_v (1 - q_t)); when numerator and
    denominator both vanish (degenerate boundary valences) pi_r is 0.5.
    """
    if len(params.strengths) != data.n_individuals or len(params.valences) != data.n_types:
        raise ValueError("parameter dimensions do not match dataset")
    pi = np.empty(data.n_records, dtype=np.float64)
    backend.active().estep_loglik(
        data.winners, data.losers, data.types, params.strengths, params.valences, pi
    )
    return Responsibilities(pi)


def m_step_valences(data: Dataset, resp: Responsibilities) -> tuple[np.ndarray, np.ndarray]:
    """Per-type mean responsibility, and which types had any records.

    Returns ``(estimates, populated)``.  A type with zero records yields no
    estimate: its entry of ``estimates`` is NaN and ``populated`` is False
    there, so the caller can carry the previous value forward.
    """
    if len(resp.values) != data.n_records:
        raise ValueError("responsibility length does not match record count")
    sums, counts = backend.active().valence_sums(data.types, resp.values, data.n_types)
    populated = counts > 0
    estimates = np.full(data.n_types, np.nan)
    np.divide(sums, counts, out=estimates, where=populated)
    return estimates, populated


def m_step_strengths(
    data: Dataset,
    resp: Responsibilities,
    counts: CountMatrix,
    current: np.ndarray,
    mode: Mode = Mode.MAP,
    inner_tol: float = 1e-10,
    max_inner_iters: int = 1000,
) -> tuple[np.ndarray, bool]:
    """Solve the strength fixed point for the given responsibilities.

    Sweeps every individual per pass from the previous pass's values until
    the max relative change drops below ``inner_tol`` or the pass cap is
    hit.  ML mode clamps strengths to [1e-150, 1e150]; the returned flag
    reports whether the clamp fired.
    """
    current = np.asarray(current, dtype=np.float64)
    if np.any(current <= 0) or not np.all(np.isfinite(current)):
        raise ValueError("current strengths must be positive and finite")
    mode = Mode(mode)
    kernels = backend.active()
    wins = kernels.weighted_wins(data.winners, data.losers, resp.values, data.n_individuals)
    pi_idx, pj_idx, pcnt = counts.pair_arrays()
    lam = current.copy()
    _, _, saturated = kernels.strength_solve(
        pi_idx,
        pj_idx,
        pcnt,
        wins,
        lam,
        mode is Mode.MAP,
        mode is Mode.ML,
        inner_tol,
        max_inner_iters,
    )
    return lam, bool(saturated)


def normalize_strengths(strengths: np.ndarray) -> np.ndarray:
    """Divide by the geometric mean so the scores average to zero."""
    s = np.log(np.asarray(strengths, dtype=np.float64))
    return np.exp(s - s.mean())


def orient(params: ModelParams, data: Dataset) -> tuple[ModelParams, bool]:
    """Resolve the mirror degeneracy by interaction-weighted mean valence.

    If the mean of q over records falls below 0.5 the fit is upside down
    (behaviors read as predominantly subordinate), so all strengths are
    inverted and all valences complemented.  Ties and empty datasets keep
    the current orientation.
    """
    if data.n_records == 0:
        return params, False
    mean_valence = float(np.mean(params.valences[data.types]))
    if mean_valence < 0.5:
        return params.flipped(), True
    return params, False


def _initial_params(
    rng: np.random.Generator, n: int, t: int, spread: float, pin_valences: bool
) -> tuple[np.ndarray, np.ndarray]:
    # draw q away from the boundaries and s with a small spread; the exact
    # symmetric point (all lambda = 1, all q = 0.5) is a fixed point of the
    # EM maps and must not be the starting point
    q = np.ones(t) if pin_valences else rng.uniform(0.05, 0.95, t)
    lam = np.exp(rng.normal(0.0, spread, n))
    return lam, q


def _em_loop(data: Dataset, config: FitConfig, pin_valences: bool) -> FitResult:
    if data.n_records == 0:
        raise ValueError("cannot fit an empty dataset")
    n, t, m = data.n_individuals, data.n_types, data.n_records
    if config.mode is Mode.ML:
        referenced = np.zeros(n, dtype=bool)
        referenced[data.winners] = True
        referenced[data.losers] = True
        if not referenced.all():
            missing = int(np.argmin(referenced))
            raise ValueError(
                f"ML mode requires every individual in at least one record; "
                f"index {missing} ({data.individual_labels[missing]}) has none"
            )

    kernels = backend.active()
    rng = np.random.default_rng(config.seed)
    lam, q = _initial_params(rng, n, t, config.init_score_spread, pin_valences)

    pi_idx, pj_idx, pcnt = count_matrix(data).pair_arrays()
    type_counts = np.bincount(data.types, minlength=t)
    empty_types = tuple(int(i) for i in np.nonzero(type_counts == 0)[0])

    use_prior = config.mode is Mode.MAP
    clamp = config.mode is Mode.ML
    pi = np.empty(m, dtype=np.float64)
    trace: list[float] = []
    converged = False
    saturated = False
    iterations = 0

    def objective_from(ll: float, strengths: np.ndarray) -> float:
        if use_prior:
            return ll + float(np.sum(np.log(strengths) - 2.0 * np.log1p(strengths)))
        return ll

    for iterations in range(1, config.max_outer_iters + 1):
        ll = kernels.estep_loglik(data.winners, data.losers, data.types, lam, q, pi)
        trace.append(objective_from(ll, lam))

        if pin_valences:
            q_new = q
        else:
            sums, counts = kernels.valence_sums(data.types, pi, t)
            q_new = q.copy()
            populated = counts > 0
            np.divide(sums, counts, out=q_new, where=populated)

        wins = kernels.weighted_wins(data.winners, data.losers, pi, n)
        lam_new = lam.copy()
        _, _, sat = kernels.strength_solve(
            pi_idx, pj_idx, pcnt, wins, lam_new, use_prior, clamp,
            config.inner_tol, config.max_inner_iters,
        )
        saturated = saturated or bool(sat)
        if config.mode is Mode.ML:
            lam_new = normalize_strengths(lam_new)

        delta_s = float(np.max(np.abs(np.log(lam_new) - np.log(lam))))
        delta_q = float(np.max(np.abs(q_new - q))) if t else 0.0
        lam, q = lam_new, q_new
        if delta_s < config.outer_tol and delta_q < config.outer_tol:
            converged = True
            break

    final_ll = kernels.estep_loglik(data.winners, data.losers, data.types, lam, q, pi)
    trace.append(objective_from(final_ll, lam))

    params, flipped = orient(ModelParams(lam, q), data)
    scores = params.scores
    return FitResult(
        params=params,
        scores=scores,
        ranking=_ranking(params.strengths),
        objective_trace=np.asarray(trace),
        converged=converged,
        outer_iterations=iterations,
        oriented_flipped=flipped,
        mode=config.mode,
        empty_types=empty_types,
        strength_saturated=saturated,
    )


def fit(data: Dataset, config: FitConfig | None = None) -> FitResult:
    """Fit strengths and valence probabilities to an interaction log.

    Initializes randomly from the seeded generator, then loops E-step,
    valence M-step and strength M-step (plus renormalization in ML mode)
    until both parameter deltas drop below ``outer_tol``, applying the
    orientation pass once at the end.  Non-convergence is reported through
    ``FitResult.converged``, never raised.  Identical data, config and seed
    give an identical result.
    """
    return _em_loop(data, config or FitConfig(), pin_valences=False)
