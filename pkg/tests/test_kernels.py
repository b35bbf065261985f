"""Parity between the compiled and pure-numpy kernel backends."""

import numpy as np
import pytest

from multirank import backend
from multirank.model import count_matrix
from multirank.synthetic import generate_dataset

needs_compiled = pytest.mark.skipif(
    "compiled" not in backend.available(), reason="compiled extension not built"
)


def random_problem(seed, n=30, m=400, t=4):
    rng = np.random.default_rng(seed)
    truth = generate_dataset(n, m, t, 0.0, 1.0, rng)
    d = truth.dataset
    lam = np.exp(rng.normal(0, 1.5, n))
    q = rng.random(t)
    return d, lam, q


@needs_compiled
@pytest.mark.parametrize("seed", range(5))
def test_estep_parity(seed):
    d, lam, q = random_problem(seed)
    pis = {}
    lls = {}
    for name in ("python", "compiled"):
        pi = np.empty(d.n_records)
        lls[name] = backend.get(name).estep_loglik(d.winners, d.losers, d.types, lam, q, pi)
        pis[name] = pi
    assert pis["python"] == pytest.approx(pis["compiled"], abs=1e-14)
    assert lls["python"] == pytest.approx(lls["compiled"], rel=1e-12, abs=1e-10)


@needs_compiled
def test_estep_degenerate_record_gets_half():
    # both mixture branches underflow to exactly zero: 5e-324 * 0.5 rounds to 0
    winners = np.array([0], dtype=np.int32)
    losers = np.array([1], dtype=np.int32)
    types = np.array([0], dtype=np.int32)
    lam = np.array([5e-324, 5e-324])
    q = np.array([0.5])
    for name in backend.available():
        pi = np.empty(1)
        ll = backend.get(name).estep_loglik(winners, losers, types, lam, q, pi)
        assert pi[0] == 0.5
        assert ll == -np.inf  # documented sentinel, not an exception


@needs_compiled
@pytest.mark.parametrize("seed", range(5))
def test_wins_and_valence_sums_parity(seed):
    d, lam, q = random_problem(seed)
    pi = np.empty(d.n_records)
    backend.get("python").estep_loglik(d.winners, d.losers, d.types, lam, q, pi)
    w_py = backend.get("python").weighted_wins(d.winners, d.losers, pi, d.n_individuals)
    w_cy = backend.get("compiled").weighted_wins(d.winners, d.losers, pi, d.n_individuals)
    assert w_py == pytest.approx(w_cy, rel=1e-13)
    s_py, c_py = backend.get("python").valence_sums(d.types, pi, d.n_types)
    s_cy, c_cy = backend.get("compiled").valence_sums(d.types, pi, d.n_types)
    assert s_py == pytest.approx(s_cy, rel=1e-13)
    assert np.array_equal(c_py, c_cy)


@needs_compiled
@pytest.mark.parametrize("seed,add_prior", [(0, True), (1, True), (2, False), (3, False)])
def test_strength_solve_parity(seed, add_prior):
    d, lam, q = random_problem(seed)
    pi = np.empty(d.n_records)
    backend.get("python").estep_loglik(d.winners, d.losers, d.types, lam, q, pi)
    wins = backend.get("python").weighted_wins(d.winners, d.losers, pi, d.n_individuals)
    pi_idx, pj_idx, pcnt = count_matrix(d).pair_arrays()
    results = {}
    for name in ("python", "compiled"):
        cur = lam.copy()
        its, rel, sat = backend.get(name).strength_solve(
            pi_idx, pj_idx, pcnt, wins, cur, add_prior, not add_prior, 1e-12, 5000
        )
        assert rel < 1e-12
        results[name] = cur
    assert results["python"] == pytest.approx(results["compiled"], rel=1e-9)


@needs_compiled
def test_strength_solve_dense_and_pair_paths_agree():
    # a dense problem (every pair interacts) exercises the dense-matrix path
    # of the compiled kernel against the pair-list path of the fallback
    d, lam, q = random_problem(7, n=12, m=600, t=2)
    pi = np.empty(d.n_records)
    backend.get("python").estep_loglik(d.winners, d.losers, d.types, lam, q, pi)
    wins = backend.get("python").weighted_wins(d.winners, d.losers, pi, d.n_individuals)
    pi_idx, pj_idx, pcnt = count_matrix(d).pair_arrays()
    assert 5 * len(pi_idx) >= d.n_individuals**2  # compiled kernel picks dense
    out = {}
    for name in ("python", "compiled"):
        cur = lam.copy()
        backend.get(name).strength_solve(pi_idx, pj_idx, pcnt, wins, cur, True, False, 1e-13, 10000)
        out[name] = cur
    assert out["python"] == pytest.approx(out["compiled"], rel=1e-9)


def test_ml_clamp_saturates(kernel_backend):
    # one individual loses every record with pi = 1: its ML strength heads to
    # zero and must be clamped with the saturation flag raised
    winners = np.array([0, 0, 0], dtype=np.int32)
    losers = np.array([1, 1, 1], dtype=np.int32)
    pi = np.ones(3)
    k = backend.active()
    wins = k.weighted_wins(winners, losers, pi, 2)
    pi_idx = np.array([0], dtype=np.int32)
    pj_idx = np.array([1], dtype=np.int32)
    pcnt = np.array([3.0])
    lam = np.ones(2)
    its, rel, sat = k.strength_solve(pi_idx, pj_idx, pcnt, wins, lam, False, True, 1e-10, 200000)
    assert sat
    assert lam[1] == 1e-150
