"""Vectorised candidate generation over all intervals ``[y_j, y_{j+1})``.

Each ``scan_*`` function returns every admissible candidate of one family:
boundary candidates at ``x_min = y_j`` (remaining parameters optimised with
the split fixed) and interior stationary points strictly inside intervals.
The caller reduces them with :meth:`Candidates.best_index`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..distributions import EXP_BETA_MIN, _loglik_terms
from ..sample_stats import IntervalTable
from ..solvers import illinois_vec, newton_vec
from . import _formulas as F
from ._coresums import SeriesCoreSums

ALPHA_MAX = 1e3
ALPHA_LO = 1 + 1e-9
EXP_BETA_BOUND = 50.0
_half = np.geomspace(1e-6, EXP_BETA_BOUND, 90)
EXP_BETA_GRID = np.concatenate([-_half[::-1], _half])
CHUNK = 8192
TIE_TOL = 1e-12
FORCED_LINE_OFFSET = 1e-9


@dataclass
class Candidates:
    alpha: np.ndarray
    beta: np.ndarray
    x_min: np.ndarray
    loglik: np.ndarray
    row: np.ndarray
    boundary: np.ndarray

    @classmethod
    def build(cls, alpha, beta, x_min, loglik, row, boundary, mask=None):
        arrs = [np.broadcast_to(np.asarray(v, dtype=float), np.shape(loglik)).ravel()
                for v in (alpha, beta, x_min, loglik)]
        row = np.broadcast_to(np.asarray(row), np.shape(loglik)).ravel().astype(int)
        bnd = np.broadcast_to(np.asarray(boundary, dtype=bool), np.shape(loglik)).ravel()
        ok = np.isfinite(arrs[3]) & np.isfinite(arrs[0])
        if mask is not None:
            ok &= np.broadcast_to(mask, np.shape(loglik)).ravel()
        return cls(*(a[ok] for a in arrs), row[ok], bnd[ok])

    @classmethod
    def concat(cls, items):
        items = list(items)
        if not items:
            return cls(*(np.empty(0) for _ in range(4)), np.empty(0, int), np.empty(0, bool))
        return cls(*(np.concatenate([getattr(c, f) for c in items])
                     for f in ("alpha", "beta", "x_min", "loglik", "row", "boundary")))

    def __len__(self):
        return len(self.loglik)

    def best_index(self):
        """Index of the maximum; near-ties prefer boundary, then smaller x_min."""
        if not len(self):
            return None
        top = np.max(self.loglik)
        tied = np.flatnonzero(self.loglik >= top - TIE_TOL)
        order = sorted(tied, key=lambda i: (not self.boundary[i], self.x_min[i], -self.loglik[i]))
        return int(order[0])

    def take(self, i):
        return (float(self.alpha[i]), float(self.beta[i]), float(self.x_min[i]),
                float(self.loglik[i]), int(self.row[i]), bool(self.boundary[i]))


def _rows(tab: IntervalTable):
    return np.arange(len(tab))


def _ll(kind, tab, rows, alpha, beta, xm, core_sum=None):
    return _loglik_terms(kind, alpha, beta, xm, tab.n, tab.n_L[rows], tab.mean_ln_L[rows],
                         tab.n_S[rows], tab.mean_ln_S[rows], tab.mean_x_S[rows], core_sum)


def _a(tab, rows, xm):
    return F.tail_sum(tab.n_L[rows], tab.mean_ln_L[rows], xm)


def _inside(tab, rows, xm):
    return (xm >= tab.y[rows]) & (xm < tab.y_next[rows])


def _interval_roots(tab, h, direction=-1):
    """Roots in ``[y_j, y_{j+1}]`` of ``h(rows, xm)`` by sign change at the ends.

    ``direction=-1`` keeps only + to - crossings (maxima of a profile whose
    derivative is ``h``); ``0`` keeps both.
    """
    rows = _rows(tab)
    with np.errstate(all="ignore"):
        hl = h(rows, tab.y)
        hr = h(rows, tab.y_next)
    if direction < 0:
        sel = (hl > 0) & (hr < 0)
    else:
        sel = ((hl > 0) & (hr < 0)) | ((hl < 0) & (hr > 0))
    rows = rows[sel]
    if not rows.size:
        return rows, np.empty(0)
    with np.errstate(all="ignore"):
        xm = illinois_vec(lambda x: h(rows, x), tab.y[rows], tab.y_next[rows])
    return rows, xm


# --- uniform -----------------------------------------------------------------

def scan_uni(tab: IntervalTable) -> Candidates:
    rows = _rows(tab)
    a = _a(tab, rows, tab.y)
    alpha = F.uni_alpha_hat(tab.n, a)
    ll = _ll("pow", tab, rows, alpha, 0.0, tab.y)
    return Candidates.build(alpha, np.nan, tab.y, ll, rows, True, alpha > 1)


# --- pow ---------------------------------------------------------------------

def scan_pow(tab: IntervalTable, beta=None) -> Candidates:
    n = tab.n
    rows = _rows(tab)
    y = tab.y
    a = _a(tab, rows, y)
    out = []
    with np.errstate(all="ignore"):
        if beta is None:
            b = F.pow_core_sum(tab.n_S, tab.mean_ln_S, y)
            for bh in F.pow_beta_hats(n, a, b):
                al = F.pow_alpha_hat(n, a, bh)
                ok = (bh > -1) & np.isfinite(bh) & (al > 1)
                ll = _ll("pow", tab, rows, al, bh, y)
                out.append(Candidates.build(al, bh, y, ll, rows, True, ok))
        else:
            al = F.pow_alpha_hat(n, a, beta)
            out.append(Candidates.build(al, beta, y, _ll("pow", tab, rows, al, beta, y),
                                        rows, True, al > 1))
        al, bh, ln_xm = F.pow_interior(n, tab.n_L, tab.n_S, tab.mean_ln_L, tab.mean_ln_S, beta)
        xm = np.exp(ln_xm)
        bh = np.broadcast_to(bh, al.shape)
        ok = (bh > -1) & (al > 1) & _inside(tab, rows, xm) & (xm > y)
        ll = _ll("pow", tab, rows, al, bh, xm)
        out.append(Candidates.build(al, bh, xm, ll, rows, False, ok))
    return Candidates.concat(out)


def forced_pow_alpha(n, a, b, n_L):
    """Safeguarded Newton root of dlnL/dalpha for the forced pow core."""
    return newton_vec(lambda al: F.fpow_dlda(n, al, a, b), lambda al: F.fpow_d2(n, al),
                      1 + n_L / a, np.full(np.shape(a), ALPHA_LO), np.full(np.shape(a), ALPHA_MAX))


def scan_forced_pow(tab: IntervalTable) -> Candidates:
    n = tab.n
    rows = _rows(tab)
    y = tab.y
    a = _a(tab, rows, y)
    b = F.pow_core_sum(tab.n_S, tab.mean_ln_S, y)
    al = forced_pow_alpha(n, a, b, tab.n_L)
    ok = (al > ALPHA_LO) & (al < ALPHA_MAX)
    out = [Candidates.build(al, al, y, _ll("pow", tab, rows, al, al, y), rows, True, ok)]
    al, ln_xm = F.fpow_interior(n, tab.n_L, tab.n_S, tab.mean_ln_L, tab.mean_ln_S)
    with np.errstate(all="ignore"):
        xm = np.exp(ln_xm)
        ok = (al > 1) & _inside(tab, rows, xm) & (xm > y)
        ll = _ll("pow", tab, rows, al, al, xm)
    out.append(Candidates.build(al, al, xm, ll, rows, False, ok))
    return Candidates.concat(out)


# --- exp ---------------------------------------------------------------------

def _grid_roots(fun, rows, grid, direction):
    """Bracketed roots of ``fun(rows, beta)`` along ``grid``, chunked over rows."""
    found_r, found_b = [], []
    for s in range(0, len(rows), CHUNK):
        r = rows[s:s + CHUNK]
        with np.errstate(all="ignore"):
            vals = fun(r[:, None], grid[None, :])
        v0, v1 = vals[:, :-1], vals[:, 1:]
        if direction < 0:
            hit = (v0 > 0) & (v1 < 0)
        else:
            hit = ((v0 > 0) & (v1 < 0)) | ((v0 < 0) & (v1 > 0))
        ri, gi = np.nonzero(hit)
        if ri.size:
            rr = r[ri]
            with np.errstate(all="ignore"):
                root = illinois_vec(lambda bb: fun(rr, bb), grid[gi], grid[gi + 1])
            found_r.append(rr)
            found_b.append(root)
    if not found_r:
        return np.empty(0, int), np.empty(0)
    return np.concatenate(found_r), np.concatenate(found_b)


def _exp_ok(alpha, beta):
    return (alpha > 1) & (np.abs(beta) >= EXP_BETA_MIN) & (beta != alpha) & np.isfinite(beta)


def scan_exp(tab: IntervalTable, beta=None) -> Candidates:
    n = tab.n
    rows = _rows(tab)
    y = tab.y
    out = []
    if beta is None:
        a_all = _a(tab, rows, y)
        e_all = F.exp_core_sum(tab.n_S, tab.mean_x_S, y)

        def prof(r, bb):
            al = F.exp_alpha_hat(n, a_all[r], bb)
            return F.exp_dldb(n, al, bb, e_all[r])

        rr, bb = _grid_roots(prof, rows, EXP_BETA_GRID, direction=-1)
        al = F.exp_alpha_hat(n, a_all[rr], bb)
        ll = _ll("exp", tab, rr, al, bb, y[rr])
        out.append(Candidates.build(al, bb, y[rr], ll, rr, True, _exp_ok(al, bb)))

        c = tab.mean_ln_L - np.log(tab.mean_x_S)
        ratio = tab.n_L / tab.n_S
        rr, bb = _grid_roots(lambda r, b_: F.exp_interior_g(b_, c[r], ratio[r]),
                             rows, EXP_BETA_GRID, direction=0)
        al, xm = F.exp_interior_from_beta(bb, tab.n_L[rr], tab.n_S[rr], tab.mean_x_S[rr])
        with np.errstate(all="ignore"):
            ll = _ll("exp", tab, rr, al, bb, xm)
        ok = _exp_ok(al, bb) & _inside(tab, rr, xm) & (xm > y[rr])
        out.append(Candidates.build(al, bb, xm, ll, rr, False, ok))

        # the stationarity system is quadratic in alpha; its other root is the
        # excluded line beta = alpha, approached here from inside the domain
        f = scan_forced_exp(tab)
        bb = f.alpha * (1 + FORCED_LINE_OFFSET)
        ll = _ll("exp", tab, f.row, f.alpha, bb, f.x_min)
        out.append(Candidates.build(f.alpha, bb, f.x_min, ll, f.row, f.boundary, _exp_ok(f.alpha, bb)))
    else:
        a = _a(tab, rows, y)
        al = F.exp_alpha_hat(n, a, beta)
        ll = _ll("exp", tab, rows, al, beta, y)
        out.append(Candidates.build(al, beta, y, ll, rows, True, _exp_ok(al, beta)))

        def h(r, xm):
            al_ = F.exp_alpha_hat(n, _a(tab, r, xm), beta)
            return -n + al_ * tab.n_L[r] + beta * tab.n_S[r] * tab.mean_x_S[r] / xm

        rr, xm = _interval_roots(tab, h, direction=-1)
        al = F.exp_alpha_hat(n, _a(tab, rr, xm), beta)
        ll = _ll("exp", tab, rr, al, beta, xm)
        ok = _exp_ok(al, beta) & _inside(tab, rr, xm) & (xm > y[rr])
        out.append(Candidates.build(al, beta, xm, ll, rr, False, ok))
    return Candidates.concat(out)


def forced_exp_alpha(n, a, e, n_L):
    return newton_vec(lambda al: F.fexp_dlda(n, al, a, e), lambda al: F.fexp_d2(n, al),
                      1 + n_L / a, np.full(np.shape(a), ALPHA_LO), np.full(np.shape(a), ALPHA_MAX))


def scan_forced_exp(tab: IntervalTable) -> Candidates:
    n = tab.n
    rows = _rows(tab)
    y = tab.y
    a = _a(tab, rows, y)
    e = F.exp_core_sum(tab.n_S, tab.mean_x_S, y)
    al = forced_exp_alpha(n, a, e, tab.n_L)
    ok = (al > ALPHA_LO) & (al < ALPHA_MAX)
    out = [Candidates.build(al, al, y, _ll("exp", tab, rows, al, al, y), rows, True, ok)]

    def g(r, xm):
        al_ = F.fexp_alpha_interior(n, tab.n_L[r], tab.n_S[r], tab.mean_x_S[r], xm)
        return F.fexp_dlda(n, al_, _a(tab, r, xm), F.exp_core_sum(tab.n_S[r], tab.mean_x_S[r], xm))

    rr, xm = _interval_roots(tab, g, direction=0)
    al = F.fexp_alpha_interior(n, tab.n_L[rr], tab.n_S[rr], tab.mean_x_S[rr], xm)
    ll = _ll("exp", tab, rr, al, al, xm)
    ok = (al > 1) & _inside(tab, rr, xm) & (xm > y[rr])
    out.append(Candidates.build(al, al, xm, ll, rr, False, ok))
    return Candidates.concat(out)


# --- alg ---------------------------------------------------------------------

def core_sums(tab: IntervalTable, shape: float) -> SeriesCoreSums:
    return SeriesCoreSums(np.log(tab.sample.values), tab.n_S, tab.y, shape)


def scan_alg(tab: IntervalTable, beta: float, sums: SeriesCoreSums | None = None) -> Candidates:
    """Alg candidates at a fixed core exponent ``beta``."""
    n = tab.n
    rows = _rows(tab)
    y = tab.y
    sums = sums or core_sums(tab, beta)
    a = _a(tab, rows, y)
    al = F.alg_alpha_hat(n, a, beta)
    ll = _ll("alg", tab, rows, al, beta, y, sums.ln_core(rows, y))
    out = [Candidates.build(al, beta, y, ll, rows, True, al > 1)]

    def h(r, xm):
        al_ = F.alg_alpha_hat(n, _a(tab, r, xm), beta)
        return -n + al_ * tab.n_L[r] + beta * sums.ratio(r, xm)

    rr, xm = _interval_roots(tab, h, direction=-1)
    al = F.alg_alpha_hat(n, _a(tab, rr, xm), beta)
    ll = _ll("alg", tab, rr, al, beta, xm, sums.ln_core(rr, xm))
    ok = (al > 1) & _inside(tab, rr, xm) & (xm > y[rr])
    out.append(Candidates.build(al, beta, xm, ll, rr, False, ok))
    return Candidates.concat(out)


def scan_forced_alg(tab: IntervalTable, alpha: float, sums: SeriesCoreSums | None = None) -> Candidates:
    """Forced-alg candidates at a fixed ``alpha`` (x_min optimised only)."""
    n = tab.n
    rows = _rows(tab)
    y = tab.y
    sums = sums or core_sums(tab, alpha)
    ll = _ll("alg", tab, rows, alpha, alpha, y, sums.ln_core(rows, y))
    out = [Candidates.build(alpha, alpha, y, ll, rows, True)]

    def h(r, xm):
        return -n + alpha * tab.n_L[r] + alpha * sums.ratio(r, xm)

    rr, xm = _interval_roots(tab, h, direction=-1)
    ll = _ll("alg", tab, rr, alpha, alpha, xm, sums.ln_core(rr, xm))
    ok = _inside(tab, rr, xm) & (xm > y[rr])
    out.append(Candidates.build(alpha, alpha, xm, ll, rr, False, ok))
    return Candidates.concat(out)
