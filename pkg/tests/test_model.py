import math

import numpy as np
import pytest

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

# frozen via an independent brute-force enumeration of both stance values
# per record (see test_log_marginal_matches_enumeration_oracle)
ORACLE_5RECORD_LL = -3.50938175509883
ORACLE_5RECORD_DATA = [(0, 1, 0), (1, 2, 1), (2, 0, 0), (0, 2, 1), (1, 0, 0)]
ORACLE_5RECORD_LAM = [1.5, 0.8, 1.2]
ORACLE_5RECORD_Q = [0.7, 0.4]


def make_dataset(records, n=None, t=None):
    return Dataset(records, n_individuals=n, n_types=t)


class TestLogistic:
    def test_symmetry_point(self):
        assert logistic(0.0) == 0.5

    def test_ln3(self):
        assert logistic(math.log(3)) == pytest.approx(0.75, abs=1e-15)
        assert logistic(-math.log(3)) == pytest.approx(0.25, abs=1e-15)

    def test_complement_identity(self, rng):
        for s in rng.normal(0, 5, 200):
            assert abs(logistic(s) + logistic(-s) - 1.0) < 1e-12

    def test_extreme_arguments_do_not_overflow(self):
        assert logistic(1000.0) == 1.0
        assert logistic(-1000.0) == pytest.approx(0.0, abs=1e-300)
        assert 0.0 < logistic(-30.0) < logistic(30.0) < 1.0

    def test_rejects_non_finite(self):
        for bad in (math.inf, -math.inf, math.nan):
            with pytest.raises(ValueError):
                logistic(bad)


class TestDominanceProbability:
    def test_equal_strengths(self):
        assert dominance_probability(1.0, 1.0) == 0.5

    def test_three_to_one(self):
        assert dominance_probability(3.0, 1.0) == pytest.approx(0.75, abs=1e-15)

    def test_scale_invariance(self):
        for c in (1e-8, 0.5, 7.0, 1e12):
            assert dominance_probability(2 * c, c) == pytest.approx(2 / 3, rel=1e-12)

    def test_complement(self, rng):
        for a, b in np.exp(rng.normal(0, 3, (100, 2))):
            assert dominance_probability(a, b) + dominance_probability(b, a) == pytest.approx(
                1.0, abs=1e-12
            )

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            dominance_probability(0.0, 1.0)
        with pytest.raises(ValueError):
            dominance_probability(1.0, -2.0)
        with pytest.raises(ValueError):
            dominance_probability(math.inf, 1.0)


class TestRecordJointProbability:
    def test_known_values(self):
        params = ModelParams([1.0, 1.0], [0.7])
        rec = InteractionRecord(0, 1, 0)
        assert record_joint_probability(rec, params, 1) == pytest.approx(0.35, abs=1e-15)
        assert record_joint_probability(rec, params, 0) == pytest.approx(0.15, abs=1e-15)

    def test_marginalization_matches_likelihood_factor(self, rng):
        for _ in range(50):
            lam = np.exp(rng.normal(0, 2, 3))
            q = rng.random(2)
            params = ModelParams(lam, q)
            rec = InteractionRecord(0, 2, 1)
            total = sum(record_joint_probability(rec, params, s) for s in (0, 1))
            data = make_dataset([rec], n=3, t=2)
            assert math.log(total) == pytest.approx(
                log_marginal_likelihood(data, params), abs=1e-12
            )

    def test_dimension_mismatch(self):
        params = ModelParams([1.0, 1.0], [0.5])
        with pytest.raises(ValueError):
            record_joint_probability(InteractionRecord(0, 2, 0), params, 1)
        with pytest.raises(ValueError):
            record_joint_probability(InteractionRecord(0, 1, 1), params, 1)


class TestLogMarginalLikelihood:
    def test_single_record_even(self):
        data = make_dataset([(0, 1, 0)])
        params = ModelParams([1.0, 1.0], [0.5])
        assert log_marginal_likelihood(data, params) == pytest.approx(math.log(0.5), abs=1e-15)

    def test_single_record_reduces_to_bradley_terry(self):
        # q = 1 recovers the plain winner probability lam_u / (lam_u + lam_v)
        data = make_dataset([(0, 1, 0)])
        params = ModelParams([3.0, 1.0], [1.0])
        assert log_marginal_likelihood(data, params) == pytest.approx(math.log(0.75), abs=1e-15)

    def test_matches_enumeration_oracle(self):
        data = make_dataset(ORACLE_5RECORD_DATA, n=3, t=2)
        params = ModelParams(ORACLE_5RECORD_LAM, ORACLE_5RECORD_Q)
        # independent oracle: enumerate both stance values per record
        expected = 0.0
        for u, v, t in ORACLE_5RECORD_DATA:
            lam, q = ORACLE_5RECORD_LAM, ORACLE_5RECORD_Q
            per_record = sum(
                (lam[u] * q[t] if s else lam[v] * (1 - q[t])) / (lam[u] + lam[v])
                for s in (0, 1)
            )
            expected += math.log(per_record)
        assert expected == pytest.approx(ORACLE_5RECORD_LL, abs=1e-12)
        assert log_marginal_likelihood(data, params) == pytest.approx(expected, abs=1e-12)

    def test_empty_dataset_gives_zero(self):
        data = Dataset([], n_individuals=2, n_types=1)
        assert log_marginal_likelihood(data, ModelParams([1.0, 2.0], [0.5])) == 0.0

    def test_flip_symmetry(self, rng):
        records = [(i % 4, (i % 4 + 1 + (i // 4) % 3) % 4, i % 3) for i in range(24)]
        data = make_dataset(records, n=4, t=3)
        for _ in range(100):
            params = ModelParams(np.exp(rng.normal(0, 3, 4)), rng.random(3))
            a = log_marginal_likelihood(data, params)
            b = log_marginal_likelihood(data, params.flipped())
            assert a == pytest.approx(b, abs=1e-10)

    def test_record_order_invariance(self, rng):
        records = [(0, 1, 0), (2, 3, 1), (1, 3, 0), (3, 0, 1), (2, 1, 0)]
        params = ModelParams(np.exp(rng.normal(0, 1, 4)), [0.8, 0.3])
        lls = {
            log_marginal_likelihood(make_dataset(list(p), n=4, t=2), params)
            for p in ([records[i] for i in order] for order in
                      ([0, 1, 2, 3, 4], [4, 3, 2, 1, 0], [2, 0, 4, 1, 3]))
        }
        assert max(lls) - min(lls) < 1e-12

    def test_boundary_valence_is_finite_not_error(self):
        data = make_dataset([(0, 1, 0)])
        params = ModelParams([2.0, 3.0], [0.0])
        # with q = 0 the record factor is lam_v / (lam_u + lam_v) > 0
        assert log_marginal_likelihood(data, params) == pytest.approx(math.log(0.6), abs=1e-12)

    def test_underflow_gives_minus_inf_sentinel(self):
        # the factor lam_u q / (lam_u + lam_v) underflows to exactly zero in
        # linear space; the log-space path keeps it finite unless q is an
        # exact boundary with the weight fully on the zero branch
        data = make_dataset([(0, 1, 0)])
        params = ModelParams([5e-324, 1.0], [1.0])
        value = log_marginal_likelihood(data, params)
        assert value < -700  # deep but well-defined
        tiny = ModelParams([1.0, 5e-324], [0.0])
        assert log_marginal_likelihood(data, tiny) < -700


class TestLogPrior:
    def test_single_average_individual(self):
        assert log_prior_scores(ModelParams([1.0], [0.5])) == pytest.approx(
            math.log(0.25), abs=1e-15
        )

    def test_independent_sum(self):
        assert log_prior_scores(ModelParams([1.0, 1.0], [0.5])) == pytest.approx(
            2 * math.log(0.25), abs=1e-15
        )

    def test_symmetric_under_inversion(self, rng):
        for _ in range(50):
            lam = np.exp(rng.normal(0, 4, 6))
            a = log_prior_scores(ModelParams(lam, [0.5]))
            b = log_prior_scores(ModelParams(1.0 / lam, [0.5]))
            assert a == pytest.approx(b, abs=1e-10)


class TestLogPosterior:
    def test_empty_dataset_prior_only(self):
        data = Dataset([], n_individuals=1, n_types=1)
        assert log_posterior(data, ModelParams([1.0], [0.5])) == pytest.approx(
            math.log(0.25), abs=1e-15
        )

    def test_single_record(self):
        data = make_dataset([(0, 1, 0)])
        params = ModelParams([1.0, 1.0], [0.5])
        assert log_posterior(data, params) == pytest.approx(
            math.log(0.5) + 2 * math.log(0.25), abs=1e-14
        )

    def test_flip_symmetry(self, rng):
        records = [(i % 5, (i + 2) % 5, i % 2) for i in range(30)]
        data = make_dataset(records, n=5, t=2)
        for _ in range(100):
            params = ModelParams(np.exp(rng.normal(0, 2, 5)), rng.random(2))
            assert log_posterior(data, params) == pytest.approx(
                log_posterior(data, params.flipped()), abs=1e-10
            )


class TestCountMatrix:
    def test_counting(self):
        data = make_dataset([(0, 1, 0), (1, 0, 0), (0, 2, 0)], n=3, t=1)
        cm = count_matrix(data)
        assert cm[0, 1] == 2 and cm[1, 0] == 2
        assert cm[0, 2] == 1 and cm[1, 2] == 0
        assert cm[0, 0] == 0
        assert cm.total() == 2 * data.n_records

    def test_empty(self):
        cm = count_matrix(Dataset([], n_individuals=3, n_types=1))
        assert cm.total() == 0
        assert np.all(cm.dense == 0)

    def test_row_sums_are_interaction_counts(self, rng):
        records = [(int(a), int(b), 0) for a, b in rng.integers(0, 6, (40, 2)) if a != b]
        data = make_dataset(records, n=6, t=1)
        cm = count_matrix(data)
        for i in range(6):
            expected = sum(1 for w, l, _ in records if i in (w, l))
            assert cm.row_sum(i) == expected

    def test_sparse_storage_above_limit(self):
        data = make_dataset([(0, 5000, 0), (5000, 0, 0), (1, 2, 0)], n=5001, t=1)
        cm = count_matrix(data)
        assert cm.dense is None
        assert cm[0, 5000] == 2 and cm[5000, 0] == 2
        assert cm[1, 2] == 1 and cm[2, 3] == 0
        assert cm.total() == 6
        i, j, c = cm.pair_arrays()
        assert list(zip(i.tolist(), j.tolist(), c.tolist())) == [(0, 5000, 2.0), (1, 2, 1.0)]

    def test_pair_arrays_match_dense(self, rng):
        records = [(int(a), int(b), 0) for a, b in rng.integers(0, 8, (60, 2)) if a != b]
        data = make_dataset(records, n=8, t=1)
        cm = count_matrix(data)
        i, j, c = cm.pair_arrays()
        assert np.all(i < j)
        rebuilt = np.zeros((8, 8))
        rebuilt[i, j] = c
        rebuilt += rebuilt.T
        assert np.array_equal(rebuilt, cm.dense)


class TestDomainTypes:
    def test_record_rejects_self_interaction(self):
        with pytest.raises(ValueError):
            InteractionRecord(1, 1, 0)

    def test_dataset_validates_indices(self):
        with pytest.raises(ValueError):
            Dataset([(0, 3, 0)], n_individuals=3, n_types=1)
        with pytest.raises(ValueError):
            Dataset([(0, 1, 2)], n_individuals=2, n_types=2)

    def test_dataset_rejects_duplicate_labels(self):
        with pytest.raises(ValueError):
            Dataset([(0, 1, 0)], individual_labels=["a", "a"], type_labels=["x"])

    def test_dataset_records_roundtrip(self):
        records = [InteractionRecord(0, 1, 0), InteractionRecord(2, 1, 1)]
        data = Dataset(records, n_individuals=3, n_types=2)
        assert data.records == records

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ModelParams([1.0, 0.0], [0.5])
        with pytest.raises(ValueError):
            ModelParams([1.0, np.inf], [0.5])
        with pytest.raises(ValueError):
            ModelParams([1.0], [1.5])

    def test_params_scores_and_flip(self):
        params = ModelParams([2.0, 0.5], [0.9])
        assert params.scores == pytest.approx([math.log(2), -math.log(2)])
        flipped = params.flipped()
        assert flipped.strengths == pytest.approx([0.5, 2.0])
        assert flipped.valences == pytest.approx([0.1])
