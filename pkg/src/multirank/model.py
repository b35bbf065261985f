"""Model quantities for ranking from multiple types of pairwise interactions.

Every observed contest has a winner (or instigator), a loser (or recipient)
and an interaction type.  Each individual u carries a strength lambda_u > 0
(equivalently a score s_u = ln lambda_u), and each interaction type t carries
a valence probability q_t in [0, 1]: the probability that a contest of that
type is won by the currently dominant member of the pair.  This module
evaluates probabilities, likelihoods, the logistic score prior and the
posterior.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Above this many individuals the pair-count matrix is kept as a sparse map
# instead of a dense N x N array.
DENSE_COUNT_LIMIT = 4096


@dataclass(frozen=True)
class InteractionRecord:
    """One observed contest: ``winner`` beat (or instigated against) ``loser``."""

    winner: int
    loser: int
    itype: int

    def __post_init__(self) -> None:
        if self.winner == self.loser:
            raise ValueError("interaction winner and loser must differ")
        if self.winner < 0 or self.loser < 0 or self.itype < 0:
            raise ValueError("interaction indices must be non-negative")


class Dataset:
    """An ordered log of interactions plus the individual and type registries.

    Records are stored as parallel integer arrays (``winners``, ``losers``,
    ``types``) for fast vectorized access; ``records`` materializes them as
    :class:`InteractionRecord` objects when object-level access is wanted.
    """

    __slots__ = ("winners", "losers", "types", "individual_labels", "type_labels")

    def __init__(
        self,
        records: Iterable[InteractionRecord | tuple[int, int, int]],
        n_individuals: int | None = None,
        n_types: int | None = None,
        individual_labels: Sequence[str] | None = None,
        type_labels: Sequence[str] | None = None,
    ):
        triples = [(r.winner, r.loser, r.itype) if isinstance(r, InteractionRecord) else tuple(r) for r in records]
        if triples:
            arr = np.asarray(triples, dtype=np.int32)
            self.winners = np.ascontiguousarray(arr[:, 0])
            self.losers = np.ascontiguousarray(arr[:, 1])
            self.types = np.ascontiguousarray(arr[:, 2])
        else:
            self.winners = np.empty(0, dtype=np.int32)
            self.losers = np.empty(0, dtype=np.int32)
            self.types = np.empty(0, dtype=np.int32)

        if individual_labels is not None and n_individuals is None:
            n_individuals = len(individual_labels)
        if type_labels is not None and n_types is None:
            n_types = len(type_labels)
        if n_individuals is None:
            n_individuals = int(max(self.winners.max(), self.losers.max())) + 1 if triples else 0
        if n_types is None:
            n_types = int(self.types.max()) + 1 if triples else 0

        if individual_labels is None:
            individual_labels = [f"i{k}" for k in range(n_individuals)]
        if type_labels is None:
            type_labels = [f"t{k}" for k in range(n_types)]
        self.individual_labels = tuple(str(s) for s in individual_labels)
        self.type_labels = tuple(str(s) for s in type_labels)

        self._validate(n_individuals, n_types)

    def _validate(self, n: int, t: int) -> None:
        if len(self.individual_labels) != n:
            raise ValueError(f"expected {n} individual labels, got {len(self.individual_labels)}")
        if len(self.type_labels) != t:
            raise ValueError(f"expected {t} type labels, got {len(self.type_labels)}")
        if len(set(self.individual_labels)) != n:
            raise ValueError("duplicate individual labels")
        if len(set(self.type_labels)) != t:
            raise ValueError("duplicate type labels")
        if self.n_records:
            if np.any(self.winners == self.losers):
                bad = int(np.argmax(self.winners == self.losers))
                raise ValueError(f"record {bad}: winner equals loser")
            if self.winners.min() < 0 or self.losers.min() < 0 or self.types.min() < 0:
                raise ValueError("negative index in records")
            if max(self.winners.max(), self.losers.max()) >= n:
                raise ValueError("individual index out of range")
            if self.types.max() >= t:
                raise ValueError("type index out of range")

    @classmethod
    def from_arrays(
        cls,
        winners: np.ndarray,
        losers: np.ndarray,
        types: np.ndarray,
        n_individuals: int | None = None,
        n_types: int | None = None,
        individual_labels: Sequence[str] | None = None,
        type_labels: Sequence[str] | None = None,
    ) -> "Dataset":
        ds = cls.__new__(cls)
        ds.winners = np.ascontiguousarray(winners, dtype=np.int32)
        ds.losers = np.ascontiguousarray(losers, dtype=np.int32)
        ds.types = np.ascontiguousarray(types, dtype=np.int32)
        if not (len(ds.winners) == len(ds.losers) == len(ds.types)):
            raise ValueError("winners, losers and types must have equal length")
        if individual_labels is not None and n_individuals is None:
            n_individuals = len(individual_labels)
        if type_labels is not None and n_types is None:
            n_types = len(type_labels)
        if n_individuals is None:
            n_individuals = int(max(ds.winners.max(), ds.losers.max())) + 1 if len(ds.winners) else 0
        if n_types is None:
            n_types = int(ds.types.max()) + 1 if len(ds.types) else 0
        ds.individual_labels = tuple(
            str(s) for s in (individual_labels if individual_labels is not None else (f"i{k}" for k in range(n_individuals)))
        )
        ds.type_labels = tuple(
            str(s) for s in (type_labels if type_labels is not None else (f"t{k}" for k in range(n_types)))
        )
        ds._validate(n_individuals, n_types)
        return ds

    @property
    def n_individuals(self) -> int:
        return len(self.individual_labels)

    @property
    def n_types(self) -> int:
        return len(self.type_labels)

    @property
    def n_records(self) -> int:
        return len(self.winners)

    @property
    def records(self) -> list[InteractionRecord]:
        return [
            InteractionRecord(int(w), int(l), int(t))
            for w, l, t in zip(self.winners, self.losers, self.types)
        ]

    def __len__(self) -> int:
        return self.n_records

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.individual_labels == other.individual_labels
            and self.type_labels == other.type_labels
            and np.array_equal(self.winners, other.winners)
            and np.array_equal(self.losers, other.losers)
            and np.array_equal(self.types, other.types)
        )

    def __repr__(self) -> str:
        return (
            f"Dataset(n_individuals={self.n_individuals}, n_types={self.n_types}, "
            f"n_records={self.n_records})"
        )


@dataclass
class ModelParams:
    """Per-individual strengths lambda_u and per-type valence probabilities q_t."""

    strengths: np.ndarray
    valences: np.ndarray

    def __post_init__(self) -> None:
        self.strengths = np.asarray(self.strengths, dtype=np.float64)
        self.valences = np.asarray(self.valences, dtype=np.float64)
        if self.strengths.ndim != 1 or self.valences.ndim != 1:
            raise ValueError("strengths and valences must be one-dimensional")
        if not np.all(np.isfinite(self.strengths)) or np.any(self.strengths <= 0):
            raise ValueError("strengths must be strictly positive and finite")
        if np.any(self.valences < 0) or np.any(self.valences > 1) or not np.all(np.isfinite(self.valences)):
            raise ValueError("valences must lie in [0, 1]")

    @property
    def scores(self) -> np.ndarray:
        """Scores s_u = ln lambda_u."""
        return np.log(self.strengths)

    def flipped(self) -> "ModelParams":
        """The mirror-image parameters: lambda -> 1/lambda, q -> 1 - q."""
        return ModelParams(1.0 / self.strengths, 1.0 - self.valences)

    def copy(self) -> "ModelParams":
        return ModelParams(self.strengths.copy(), self.valences.copy())


@dataclass
class CountMatrix:
    """Symmetric matrix A_ij of how many times individuals i and j interacted.

    Dense ndarray storage up to ``DENSE_COUNT_LIMIT`` individuals, a sparse
    map of unordered pairs above that.
    """

    n: int
    dense: np.ndarray | None = None
    sparse: dict[tuple[int, int], int] = field(default_factory=dict)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if i == j:
            return 0
        if self.dense is not None:
            return int(self.dense[i, j])
        return self.sparse.get((min(i, j), max(i, j)), 0)

    def total(self) -> int:
        """Sum of all entries; equals 2M for the dataset that produced it."""
        if self.dense is not None:
            return int(self.dense.sum())
        return 2 * sum(self.sparse.values())

    def row_sum(self, i: int) -> int:
        if self.dense is not None:
            return int(self.dense[i].sum())
        return sum(c for (a, b), c in self.sparse.items() if a == i or b == i)

    def pair_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unique interacting pairs as (i, j, count) arrays with i < j."""
        if self.dense is not None:
            iu, ju = np.nonzero(np.triu(self.dense))
            return iu.astype(np.int32), ju.astype(np.int32), self.dense[iu, ju].astype(np.float64)
        if not self.sparse:
            z = np.empty(0, dtype=np.int32)
            return z, z.copy(), np.empty(0, dtype=np.float64)
        items = sorted(self.sparse.items())
        i = np.array([p[0] for p, _ in items], dtype=np.int32)
        j = np.array([p[1] for p, _ in items], dtype=np.int32)
        c = np.array([c for _, c in items], dtype=np.float64)
        return i, j, c


def logistic(s: float) -> float:
    """The logistic function 1 / (1 + exp(-s)), stable for large |s|."""
    s = float(s)
    if not math.isfinite(s):
        raise ValueError("logistic requires a finite argument")
    if s >= 0:
        return 1.0 / (1.0 + math.exp(-s))
    e = math.exp(s)
    return e / (1.0 + e)


def dominance_probability(strength_u: float, strength_v: float) -> float:
    """Probability that u dominates v: lambda_u / (lambda_u + lambda_v)."""
    u, v = float(strength_u), float(strength_v)
    if not (math.isfinite(u) and math.isfinite(v)) or u <= 0 or v <= 0:
        raise ValueError("strengths must be positive and finite")
    # ratio form avoids overflow of the sum for extreme strengths
    return 1.0 / (1.0 + v / u)


def record_joint_probability(rec: InteractionRecord, params: ModelParams, stance: int) -> float:
    """Joint probability that the stance is ``stance`` and the winner won.

    stance=1 means the winner is the dominant party, stance=0 the subordinate:
    (lambda_u q_t)^stance [lambda_v (1 - q_t)]^(1-stance) / (lambda_u + lambda_v).
    """
    if stance not in (0, 1):
        raise ValueError("stance must be 0 or 1")
    n, t = len(params.strengths), len(params.valences)
    if rec.winner >= n or rec.loser >= n or rec.itype >= t:
        raise ValueError("record indices exceed parameter dimensions")
    lu = params.strengths[rec.winner]
    lv = params.strengths[rec.loser]
    q = params.valences[rec.itype]
    num = lu * q if stance == 1 else lv * (1.0 - q)
    return float(num / (lu + lv))


def _check_dims(data: Dataset, params: ModelParams) -> None:
    if len(params.strengths) != data.n_individuals:
        raise ValueError(
            f"got {len(params.strengths)} strengths for {data.n_individuals} individuals"
        )
    if len(params.valences) != data.n_types:
        raise ValueError(f"got {len(params.valences)} valences for {data.n_types} types")


def log_marginal_likelihood(data: Dataset, params: ModelParams) -> float:
    """Log-likelihood of the observed wins with the stance variables summed out.

    Sum over records of
    ln[(lambda_u q_t + lambda_v (1 - q_t)) / (lambda_u + lambda_v)],
    accumulated per-record in log space so that extreme strengths and
    boundary valences cannot overflow.  A record whose factor underflows to
    exactly zero contributes -inf; the -inf propagates as a sentinel value
    rather than raising.  An empty record list gives 0.
    """
    _check_dims(data, params)
    if data.n_records == 0:
        return 0.0
    log_lam = np.log(params.strengths)
    with np.errstate(divide="ignore"):
        log_q = np.log(params.valences)
        log_1mq = np.log1p(-params.valences)
    lu = log_lam[data.winners]
    lv = log_lam[data.losers]
    num = np.logaddexp(lu + log_q[data.types], lv + log_1mq[data.types])
    den = np.logaddexp(lu, lv)
    return float(np.sum(num - den))


def log_prior_scores(params: ModelParams) -> float:
    """Log of the logistic prior on the scores: sum of ln[lambda/(lambda+1)^2]."""
    lam = params.strengths
    return float(np.sum(np.log(lam) - 2.0 * np.log1p(lam)))


def log_posterior(data: Dataset, params: ModelParams) -> float:
    """Log posterior (up to a constant): marginal log-likelihood plus score prior.

    This is the objective whose monotone increase the EM loop guarantees in
    MAP mode.
    """
    return log_marginal_likelihood(data, params) + log_prior_scores(params)


def count_matrix(data: Dataset) -> CountMatrix:
    """Pairwise interaction counts A_ij, symmetric with zero diagonal."""
    n = data.n_individuals
    if n <= DENSE_COUNT_LIMIT:
        dense = np.zeros((n, n), dtype=np.int64)
        if data.n_records:
            lo = np.minimum(data.winners, data.losers).astype(np.int64)
            hi = np.maximum(data.winners, data.losers).astype(np.int64)
            np.add.at(dense, (lo, hi), 1)
            dense += dense.T
        return CountMatrix(n=n, dense=dense)
    sparse: dict[tuple[int, int], int] = {}
    for w, l in zip(data.winners.tolist(), data.losers.tolist()):
        key = (w, l) if w < l else (l, w)
        sparse[key] = sparse.get(key, 0) + 1
    return CountMatrix(n=n, sparse=sparse)
