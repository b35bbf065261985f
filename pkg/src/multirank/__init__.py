"""Rankings from multiple types of pairwise comparisons.

Infers a single latent ranking of individuals from a log of pairwise
interactions of several types, jointly estimating per-individual strengths
and per-type valence probabilities with an EM algorithm over a modified
Bradley-Terry model.  Supports maximum-likelihood and MAP (logistic score
prior) estimation, a synthetic-data benchmark harness and a traditional
unimodal Bradley-Terry baseline.
"""

from multirank.benchmark import (
    TABLE1_CELLS,
    BenchmarkCell,
    CellConfig,
    fit_unimodal_baseline,
    rank_from_strengths,
    run_synthetic_benchmark,
    spearman_r2,
)
from multirank.em import (
    FitConfig,
    FitResult,
    Mode,
    Responsibilities,
    e_step,
    fit,
    m_step_strengths,
    m_step_valences,
    normalize_strengths,
    orient,
)
from multirank.io import parse_interactions, serialize_interactions, write_fit_result
from multirank.model import (
    CountMatrix,
    Dataset,
    InteractionRecord,
    ModelParams,
    count_matrix,
    dominance_probability,
    log_marginal_likelihood,
    log_posterior,
    log_prior_scores,
    logistic,
    record_joint_probability,
)
from multirank.synthetic import SyntheticTruth, generate_dataset, sample_logistic_score

__version__ = "0.1.0"

__all__ = [
    "BenchmarkCell",
    "CellConfig",
    "CountMatrix",
    "Dataset",
    "FitConfig",
    "FitResult",
    "InteractionRecord",
    "Mode",
    "ModelParams",
    "Responsibilities",
    "SyntheticTruth",
    "TABLE1_CELLS",
    "count_matrix",
    "dominance_probability",
    "e_step",
    "fit",
    "fit_unimodal_baseline",
    "generate_dataset",
    "log_marginal_likelihood",
    "log_posterior",
    "log_prior_scores",
    "logistic",
    "m_step_strengths",
    "m_step_valences",
    "normalize_strengths",
    "orient",
    "parse_interactions",
    "rank_from_strengths",
    "record_joint_probability",
    "run_synthetic_benchmark",
    "sample_logistic_score",
    "serialize_interactions",
    "spearman_r2",
    "write_fit_result",
]
