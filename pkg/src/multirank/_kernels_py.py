"""Pure-numpy kernels for the EM hot loops.

Fallback implementation with the same contracts as the compiled extension
``multirank._kernels``; selected automatically when the extension is not
built.  Index arrays are int32, value arrays float64.
"""

from __future__ import annotations

import numpy as np

LAMBDA_MIN = 1e-150
LAMBDA_MAX = 1e150

NAME = "python"


def estep_loglik(winners, losers, types, lam, q, pi_out):
    """Fill ``pi_out`` with responsibilities; return the marginal log-likelihood.

    pi_r = lam_u q_t / (lam_u q_t + lam_v (1 - q_t)); a 0/0 record gets 0.5.
    A record whose marginal factor underflows to zero contributes -inf.
    """
    lu = lam[winners]
    lv = lam[losers]
    qt = q[types]
    num = lu * qt
    den = num + lv * (1.0 - qt)
    ok = den > 0.0
    pi_out.fill(0.5)
    np.divide(num, den, out=pi_out, where=ok)
    with np.errstate(divide="ignore"):
        ll = float(np.sum(np.log(den / (lu + lv))))
    return ll


def weighted_wins(winners, losers, pi, n):
    """Effective win totals: sum of pi over wins plus (1 - pi) over losses."""
    return np.bincount(winners, weights=pi, minlength=n) + np.bincount(
        losers, weights=1.0 - pi, minlength=n
    )


def valence_sums(types, pi, n_types):
    """Per-type responsibility sums and record counts."""
    sums = np.bincount(types, weights=pi, minlength=n_types)
    counts = np.bincount(types, minlength=n_types).astype(np.int64)
    return sums, counts


def strength_solve(pair_i, pair_j, pair_cnt, wins, lam, add_prior, clamp, tol, max_iter):
    """Iterate the strength fixed point to convergence, updating ``lam`` in place.

    Jacobi sweeps: every new lambda_i is computed from the previous pass.
    With ``add_prior`` the update is the MAP form (prior pseudo-win and
    2/(lambda+1) denominator term); with ``clamp`` values are clamped to
    [LAMBDA_MIN, LAMBDA_MAX] and saturation is flagged.

    Returns (iterations, final max relative delta, saturated).
    """
    n = lam.shape[0]
    numer = wins + 1.0 if add_prior else wins
    saturated = False
    maxrel = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        c = pair_cnt / (lam[pair_i] + lam[pair_j])
        denom = np.bincount(pair_i, weights=c, minlength=n) + np.bincount(
            pair_j, weights=c, minlength=n
        )
        if add_prior:
            denom += 2.0 / (lam + 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            new = numer / denom
        if clamp:
            below = new < LAMBDA_MIN
            above = new > LAMBDA_MAX
            if below.any() or above.any():
                saturated = True
                np.clip(new, LAMBDA_MIN, LAMBDA_MAX, out=new)
        maxrel = float(np.max(np.abs(new - lam) / lam))
        lam[:] = new
        if maxrel < tol:
            break
    return it, maxrel, saturated
