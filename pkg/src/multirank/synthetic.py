"""Ground-truth-labeled synthetic interaction data.

Scores are drawn from the standard logistic distribution, valence
probabilities uniformly from a chosen interval, and each record's pair is
drawn uniformly at random with replacement (a random multigraph: the same
pair may interact many times).  The latent stance of every record is kept,
so benchmarks can score inferred rankings against the truth.

All sampling goes through a caller-supplied ``numpy.random.Generator``
(PCG64 via ``numpy.random.default_rng`` throughout this package), which
makes every dataset a pure function of its seed.  The draw order is fixed:
scores, then valences, then per-record pair endpoints, types, stance
uniforms and winner uniforms, one vectorized draw each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from multirank.model import Dataset


@dataclass
class SyntheticTruth:
    """A generated dataset together with the parameters that produced it."""

    true_scores: np.ndarray
    true_valences: np.ndarray
    true_stances: np.ndarray
    dataset: Dataset

    def __post_init__(self) -> None:
        if len(self.true_scores) != self.dataset.n_individuals:
            raise ValueError("true_scores length does not match dataset")
        if len(self.true_valences) != self.dataset.n_types:
            raise ValueError("true_valences length does not match dataset")
        if len(self.true_stances) != self.dataset.n_records:
            raise ValueError("true_stances length does not match dataset")


def sample_logistic_score(rng: np.random.Generator, size: int | None = None):
    """Standard logistic draw(s) by inverse CDF: ln(p / (1 - p)), p uniform (0, 1)."""
    if size is None:
        p = rng.random()
        while p == 0.0:
            p = rng.random()
        return math.log(p) - math.log1p(-p)
    p = rng.random(size)
    zero = p == 0.0
    while zero.any():
        p[zero] = rng.random(int(zero.sum()))
        zero = p == 0.0
    return np.log(p) - np.log1p(-p)


def generate_dataset(
    n: int,
    m: int,
    t: int,
    q_min: float,
    q_max: float,
    rng: np.random.Generator,
) -> SyntheticTruth:
    """Generate ``m`` interactions among ``n`` individuals with ``t`` types.

    For each record, an unordered pair is chosen uniformly at random (with
    replacement across records) and a type uniformly; the dominant side is
    sampled from the Bradley-Terry probability of the true strengths, and
    the dominant side wins with the type's valence probability.  The stance
    bit records whether the winner was the dominant side.
    """
    if n < 2:
        raise ValueError("need at least 2 individuals")
    if m < 1:
        raise ValueError("need at least 1 interaction")
    if t < 1:
        raise ValueError("need at least 1 interaction type")
    if not (0.0 <= q_min <= q_max <= 1.0):
        raise ValueError("need 0 <= q_min <= q_max <= 1")

    scores = sample_logistic_score(rng, n)
    lam = np.exp(scores)
    valences = rng.uniform(q_min, q_max, t)

    first = rng.integers(0, n, m)
    second = rng.integers(0, n - 1, m)
    second = np.where(second >= first, second + 1, second)
    types = rng.integers(0, t, m).astype(np.int32)

    p_first_dominant = lam[first] / (lam[first] + lam[second])
    first_dominant = rng.random(m) < p_first_dominant
    dominant = np.where(first_dominant, first, second)
    subordinate = np.where(first_dominant, second, first)

    stances = rng.random(m) < valences[types]
    winners = np.where(stances, dominant, subordinate).astype(np.int32)
    losers = np.where(stances, subordinate, dominant).astype(np.int32)

    dataset = Dataset.from_arrays(winners, losers, types, n_individuals=n, n_types=t)
    return SyntheticTruth(
        true_scores=scores,
        true_valences=valences,
        true_stances=stances.astype(np.int8),
        dataset=dataset,
    )
