# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the EM hot loops; contracts match _kernels_py."""

import numpy as np

from libc.math cimport fabs, log

LAMBDA_MIN = 1e-150
LAMBDA_MAX = 1e150

NAME = "compiled"

cdef double LAM_MIN = 1e-150
cdef double LAM_MAX = 1e150

# Flush the running product of per-record factors to the log accumulator
# before it can underflow (factors are <= 1).
cdef double PROD_FLUSH = 1e-280


def estep_loglik(const int[::1] winners, const int[::1] losers, const int[::1] types,
                 const double[::1] lam, const double[::1] q, double[::1] pi_out):
    """Fill ``pi_out`` with responsibilities; return the marginal log-likelihood."""
    cdef Py_ssize_t m = winners.shape[0]
    cdef Py_ssize_t r
    cdef double lu, lv, qt, num, den, ll = 0.0, prod = 1.0
    for r in range(m):
        lu = lam[winners[r]]
        lv = lam[losers[r]]
        qt = q[types[r]]
        num = lu * qt
        den = num + lv * (1.0 - qt)
        if den > 0.0:
            pi_out[r] = num / den
        else:
            pi_out[r] = 0.5
        prod *= den / (lu + lv)
        if prod < PROD_FLUSH:
            ll += log(prod)
            prod = 1.0
    ll += log(prod)
    return ll


def weighted_wins(const int[::1] winners, const int[::1] losers, const double[::1] pi,
                  Py_ssize_t n):
    """Effective win totals: sum of pi over wins plus (1 - pi) over losses."""
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] w = out
    cdef Py_ssize_t m = winners.shape[0]
    cdef Py_ssize_t r
    for r in range(m):
        w[winners[r]] += pi[r]
        w[losers[r]] += 1.0 - pi[r]
    return out


def valence_sums(const int[::1] types, const double[::1] pi, Py_ssize_t n_types):
    """Per-type responsibility sums and record counts."""
    sums = np.zeros(n_types, dtype=np.float64)
    counts = np.zeros(n_types, dtype=np.int64)
    cdef double[::1] sv = sums
    cdef long long[::1] cv = counts
    cdef Py_ssize_t m = types.shape[0]
    cdef Py_ssize_t r
    for r in range(m):
        sv[types[r]] += pi[r]
        cv[types[r]] += 1
    return sums, counts


def strength_solve(const int[::1] pair_i, const int[::1] pair_j, const double[::1] pair_cnt,
                   const double[::1] wins, double[::1] lam, bint add_prior, bint clamp,
                   double tol, Py_ssize_t max_iter):
    """Iterate the strength fixed point to convergence, updating ``lam`` in place.

    Jacobi sweeps, MAP prior terms when ``add_prior``, clamping to
    [LAMBDA_MIN, LAMBDA_MAX] when ``clamp``.  Returns (iterations, final max
    relative delta, saturated).

    When the pair list is dense relative to n the per-pass sum uses a dense
    count matrix (contiguous rows vectorize much better than the
    gather/scatter pair loop).
    """
    cdef Py_ssize_t n = lam.shape[0]
    cdef Py_ssize_t p = pair_i.shape[0]
    cdef bint use_dense = n <= 512 and 5 * p >= n * n
    cdef Py_ssize_t it, k, i
    cdef double c, x, acc, rel, maxrel = 0.0, numer_extra = 1.0 if add_prior else 0.0
    cdef bint saturated = False

    denom_buf = np.empty(n, dtype=np.float64)
    new_buf = np.empty(n, dtype=np.float64)
    cdef double[::1] denom = denom_buf
    cdef double[::1] new = new_buf
    cdef double[:, ::1] amat = None
    if use_dense:
        amat_buf = np.zeros((n, n), dtype=np.float64)
        amat = amat_buf
        for k in range(p):
            amat[pair_i[k], pair_j[k]] = pair_cnt[k]
            amat[pair_j[k], pair_i[k]] = pair_cnt[k]

    if max_iter < 1:
        return 0, np.inf, False

    for it in range(1, max_iter + 1):
        if use_dense:
            # A is symmetric: sweep the upper triangle once, crediting both
            # endpoints; the contiguous inner loop vectorizes well
            for i in range(n):
                denom[i] = 2.0 / (lam[i] + 1.0) if add_prior else 0.0
            for i in range(n):
                x = lam[i]
                c = 0.0
                for k in range(i + 1, n):
                    acc = amat[i, k] / (x + lam[k])
                    c += acc
                    denom[k] += acc
                denom[i] += c
        else:
            for i in range(n):
                denom[i] = 2.0 / (lam[i] + 1.0) if add_prior else 0.0
            for k in range(p):
                c = pair_cnt[k] / (lam[pair_i[k]] + lam[pair_j[k]])
                denom[pair_i[k]] += c
                denom[pair_j[k]] += c
        maxrel = 0.0
        for i in range(n):
            x = (wins[i] + numer_extra) / denom[i]
            if clamp:
                if x < LAM_MIN:
                    x = LAM_MIN
                    saturated = True
                elif x > LAM_MAX:
                    x = LAM_MAX
                    saturated = True
            rel = fabs(x - lam[i]) / lam[i]
            if rel > maxrel:
                maxrel = rel
            new[i] = x
        for i in range(n):
            lam[i] = new[i]
        if maxrel < tol:
            return it, maxrel, saturated
    return max_iter, maxrel, saturated
