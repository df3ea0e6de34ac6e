"""Sums over the core set for the algebraic core.

The alg log-likelihood needs ``sum_S ln(2 - u^s)`` with ``u = x / x_min``,
which is not a function of a few running means. With ``v = u^s <= 1``::

    ln(2 - v)     = ln 2 - sum_k v^k / (k 2^k)
    v / (2 - v)   = sum_k v^k / 2^k

so both sums follow from the power sums ``Q_k = sum_S (x / y_j)^(s k)``.
Those are built for every split point in one sorted pass with the stable
recurrence ``Q_k(i) = Q_k(i-1) * (x_{i-1} / x_i)^(s k) + 1``.
"""
from __future__ import annotations

import math

import numba
import numpy as np

K_TERMS = 52
_K = np.arange(1, K_TERMS + 1, dtype=float)
_W_LN = 1.0 / (_K * 2.0 ** _K)
_W_RATIO = 1.0 / 2.0 ** _K


@numba.njit(cache=True)
def _power_sums(log_x, ends, shape, n_terms):
    m = ends.shape[0]
    out = np.empty((m, n_terms))
    q = np.ones(n_terms)
    r = 0
    while r < m and ends[r] == 0:
        out[r, :] = q
        r += 1
    if m == 0:
        return out
    for i in range(1, ends[m - 1] + 1):
        d = math.exp(shape * (log_x[i - 1] - log_x[i]))
        f = d
        for k in range(n_terms):
            q[k] = q[k] * f + 1.0
            f *= d
        while r < m and ends[r] == i:
            out[r, :] = q
            r += 1
    return out


@numba.njit(cache=True)
def _series(Q, rows, s, w):
    out = np.empty(rows.shape[0])
    n_terms = w.shape[0]
    for i in range(rows.shape[0]):
        q = Q[rows[i]]
        acc = 0.0
        for k in range(n_terms - 1, -1, -1):
            acc = (acc + w[k] * q[k]) * s[i]
        out[i] = acc
    return out


class SeriesCoreSums:
    """Core sums for many split points at one shape exponent.

    ``n_S`` and ``y`` give, per row, the core size and the largest core value.
    """

    def __init__(self, log_values, n_S, y, shape):
        self.shape = float(shape)
        self.n_S = np.asarray(n_S, dtype=float)
        self.log_y = np.log(np.asarray(y, dtype=float))
        ends = np.asarray(n_S, dtype=np.int64) - 1
        self.Q = _power_sums(np.ascontiguousarray(log_values, dtype=float), ends,
                             self.shape, K_TERMS)

    def _sum(self, rows, xm, w):
        rows = np.atleast_1d(np.asarray(rows, dtype=np.int64))
        s = np.exp(self.shape * (self.log_y[rows] - np.log(xm)))
        s = np.ascontiguousarray(np.broadcast_to(s, rows.shape), dtype=float)
        return _series(self.Q, rows, s, w)

    def ln_core(self, rows, xm):
        return self.n_S[rows] * math.log(2.0) - self._sum(rows, xm, _W_LN)

    def ratio(self, rows, xm):
        return self._sum(rows, xm, _W_RATIO)


class DirectCoreSums:
    """Exact core sums for one split, by direct summation."""

    def __init__(self, core):
        self.log_core = np.log(np.asarray(core, dtype=float))

    def _w(self, xm, shape):
        lu = self.log_core - math.log(xm)
        return lu, np.exp(shape * lu)

    def ln_core(self, xm, shape):
        _, w = self._w(xm, shape)
        return float(np.sum(np.log(2 - w)))

    def ratio(self, xm, shape):
        _, w = self._w(xm, shape)
        return float(np.sum(w / (2 - w)))

    def alpha_terms(self, xm, alpha):
        """``(sum ln(u) w/(2-w), sum 2 ln(u)^2 w/(2-w)^2)`` with ``w = u^alpha``."""
        lu, w = self._w(xm, alpha)
        g = w / (2 - w)
        return float(np.sum(lu * g)), float(np.sum(2 * lu * lu * w / (2 - w) ** 2))
