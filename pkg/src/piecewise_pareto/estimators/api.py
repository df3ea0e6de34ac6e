"""Public estimators: fixed-split solves, interior candidates and the global fit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..distributions import EXP_BETA_MIN, Family, FamilyParams, _loglik_terms, log_likelihood
from ..errors import (InvalidParams, MaxIterExceeded, NoSignChange, NoSolutionInRange,
                      NoTailData, NoValidBeta, NoValidFit)
from ..sample_stats import IntervalTable, SortedSample, SplitStats, interval_table, split_at
from ..solvers import DEFAULT, SolverConfig, bisect, nelder_mead_1d, newton
from . import _formulas as F
from . import scan as S
from ._coresums import DirectCoreSums

__all__ = ["FitResult", "fit_alpha", "fit_beta", "interior_candidate", "fit", "fit_fixed_xmin"]

ALG_BETA_GRID = np.geomspace(1e-3, 40.0, 16)
FALG_ALPHA_GRID = 1 + np.geomspace(1e-2, 40.0, 16)
# the outer search only locates the winning interval; the polish is exact
_OUTER_CFG = SolverConfig(tol_x=1e-4)
ALG_BETA_MIN = 1e-8
_POLISH_ROUNDS = 3

NOTES = {
    "pow-interior": "pow interior x_min uses ln x_min = <ln x>_L - n_L/((beta+1) n_S) "
                    "(sign corrected; the printed '+' is not stationary)",
    "forced-exp-interior": "forced-exp interior alpha = n x_min/(n_L x_min + n_S <x>_S) "
                           "(dimensionally corrected)",
    "alg-interior": "alg interior x_min condition includes the factor beta and "
                    "+(n_L/n_S) alpha (re-derived from dlnL/dx_min)",
    "exp-interior": "exp interior beta solved from r(beta)(c + ln((1-r)/beta)) = n_L/n_S, "
                    "same zero set as z(beta)",
}


@dataclass(frozen=True)
class FitResult:
    """Maximum-likelihood fit of one family.

    ``interval_index`` is the 1-based ``j`` with ``y_j <= x_min < y_{j+1}``.
    """

    params: FamilyParams
    loglik: float
    n: int
    interval_index: int | None
    at_boundary: bool
    branch_notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def family(self) -> Family:
        return self.params.family

    @property
    def n_params(self) -> int:
        return self.params.family.n_params

    @property
    def aic(self) -> float:
        return 2 * self.n_params - 2 * self.loglik

    @property
    def bic(self) -> float:
        return self.n_params * math.log(self.n) - 2 * self.loglik


# ---------------------------------------------------------------------------
# fixed split


def _tail(stats: SplitStats, x_min: float) -> float:
    if stats.n_L < 1:
        raise NoTailData("no observations above x_min")
    a = F.tail_sum(stats.n_L, stats.mean_ln_L, x_min)
    if not a > 0:
        raise NoTailData("tail log sum must be positive")
    return float(a)


def _bracket_alpha():
    return (S.ALPHA_LO, S.ALPHA_MAX)


def _falg_alpha(stats, x_min, a, cfg, direct=None):
    direct = direct or DirectCoreSums(stats.core)

    def f(al):
        return float(F.falg_dlda(stats.n, al, a, direct.alpha_terms(x_min, al)[0]))

    def fp(al):
        return float(F.falg_d2(stats.n, al, direct.alpha_terms(x_min, al)[1]))

    return newton(f, fp, 1 + stats.n_L / a, _bracket_alpha(), cfg)


def fit_alpha(family, stats: SplitStats, x_min: float, beta=None, cfg: SolverConfig = DEFAULT) -> float:
    """Maximum-likelihood alpha with the split and (unless forced) beta held fixed."""
    fam = Family(family)
    a = _tail(stats, x_min)
    n = stats.n
    if fam.has_free_beta and beta is None:
        raise InvalidParams(f"{fam.value} needs beta for a fixed-beta alpha solve")
    if fam is Family.UNI:
        al = F.uni_alpha_hat(n, a)
    elif fam is Family.POW:
        al = F.pow_alpha_hat(n, a, beta)
    elif fam is Family.EXP:
        al = F.exp_alpha_hat(n, a, beta)
    elif fam is Family.ALG:
        al = F.alg_alpha_hat(n, a, beta)
    elif fam is Family.FORCED_POW:
        b = F.pow_core_sum(stats.n_S, stats.mean_ln_S, x_min) if stats.n_S else 0.0
        al = newton(lambda t: float(F.fpow_dlda(n, t, a, b)), lambda t: float(F.fpow_d2(n, t)),
                    1 + stats.n_L / a, _bracket_alpha(), cfg)
    elif fam is Family.FORCED_EXP:
        e = F.exp_core_sum(stats.n_S, stats.mean_x_S, x_min) if stats.n_S else 0.0
        al = newton(lambda t: float(F.fexp_dlda(n, t, a, e)), lambda t: float(F.fexp_d2(n, t)),
                    1 + stats.n_L / a, _bracket_alpha(), cfg)
    else:
        al = _falg_alpha(stats, x_min, a, cfg)
    al = float(al)
    if not (math.isfinite(al) and al > 1):
        raise NoSolutionInRange(f"alpha root {al} is not above 1")
    return al


def _ll(fam: Family, stats: SplitStats, alpha, beta, x_min, core_sum=None) -> float:
    kind = fam.core
    b = 0.0 if fam is Family.UNI else beta
    return float(_loglik_terms(kind, alpha, b, x_min, stats.n, stats.n_L, stats.mean_ln_L,
                               stats.n_S, stats.mean_ln_S, stats.mean_x_S, core_sum))


def _alg_profile_fixed(stats, x_min, a, direct):
    """Negative profile log-likelihood of alg in ``t = ln beta`` at fixed x_min."""
    def g(t):
        beta = math.exp(max(t, math.log(ALG_BETA_MIN)))
        al = F.alg_alpha_hat(stats.n, a, beta)
        if not al > 1:
            return math.inf
        return -_ll(Family.ALG, stats, al, beta, x_min, direct.ln_core(x_min, beta))
    return g


def fit_beta(family, stats: SplitStats, x_min: float, cfg: SolverConfig = DEFAULT) -> tuple[float, float]:
    """Joint maximum-likelihood ``(alpha, beta)`` at a fixed split."""
    fam = Family(family)
    if not fam.has_free_beta:
        raise InvalidParams(f"{fam.value} has no free beta")
    if stats.n_S < 1:
        raise NoValidBeta("beta needs at least one core observation")
    a = _tail(stats, x_min)
    n = stats.n
    cands = []
    if fam is Family.POW:
        b = F.pow_core_sum(stats.n_S, stats.mean_ln_S, x_min)
        for bh in F.pow_beta_hats(n, a, b):
            bh = float(bh)
            if math.isfinite(bh) and bh > -1:
                al = float(F.pow_alpha_hat(n, a, bh))
                if al > 1:
                    cands.append((al, bh))
    elif fam is Family.EXP:
        e = F.exp_core_sum(stats.n_S, stats.mean_x_S, x_min)
        grid = S.EXP_BETA_GRID
        with np.errstate(all="ignore"):
            prof = F.exp_dldb(n, F.exp_alpha_hat(n, a, grid), grid, e)
        hits = np.flatnonzero((prof[:-1] > 0) & (prof[1:] < 0))
        for i in hits:
            try:
                bh = bisect(lambda t: float(F.exp_dldb(n, F.exp_alpha_hat(n, a, t), t, e)),
                            float(grid[i]), float(grid[i + 1]), cfg)
            except (NoSignChange, MaxIterExceeded):
                continue
            al = float(F.exp_alpha_hat(n, a, bh))
            if al > 1 and abs(bh) >= EXP_BETA_MIN and bh != al:
                cands.append((al, bh))
    else:
        direct = DirectCoreSums(stats.core)
        g = _alg_profile_fixed(stats, x_min, a, direct)
        ts = np.log(ALG_BETA_GRID)
        t0 = float(ts[int(np.argmin([g(t) for t in ts]))])
        t = nelder_mead_1d(g, t0, cfg, step=0.1)
        bh = math.exp(max(t, math.log(ALG_BETA_MIN)))
        al = float(F.alg_alpha_hat(n, a, bh))
        if al > 1:
            cands.append((al, bh))
    if not cands:
        raise NoValidBeta(f"no admissible beta for {fam.value} at x_min={x_min}")
    if fam is Family.ALG:
        return cands[0]
    lls = [_ll(fam, stats, al, bh, x_min) for al, bh in cands]
    return cands[int(np.argmax(lls))]


# ---------------------------------------------------------------------------
# interval candidates


@dataclass(frozen=True)
class _CoreOnly:
    """Minimal stand-in for a sample when only one split is scanned."""

    n: int
    values: np.ndarray


def _one_row_table(stats: SplitStats, y_j: float, y_next: float) -> IntervalTable:
    arr = lambda v: np.array([float(v)])  # noqa: E731
    return IntervalTable(_CoreOnly(stats.n, np.asarray(stats.core, dtype=float)), arr(y_j), arr(y_next),
                         arr(stats.n_S), arr(stats.n_L), arr(stats.mean_ln_L), arr(stats.mean_ln_S),
                         arr(stats.mean_x_S))


def _alg_interior_xm(stats, y_j, y_next, beta, direct, alpha=None, cfg=DEFAULT):
    """Root in ``(y_j, y_next)`` of the alg x_min condition, or None."""
    n = stats.n

    def h(xm):
        al = alpha if alpha is not None else F.alg_alpha_hat(n, F.tail_sum(stats.n_L, stats.mean_ln_L, xm), beta)
        return float(-n + al * stats.n_L + beta * direct.ratio(xm, beta))

    if not (h(y_j) > 0 and h(y_next) < 0):
        return None
    try:
        return bisect(h, y_j, y_next, cfg)
    except (NoSignChange, MaxIterExceeded):
        return None


def _alg_interior_at(stats, y_j, y_next, beta, direct, cfg):
    xm = _alg_interior_xm(stats, y_j, y_next, beta, direct, cfg=cfg)
    if xm is None or not (y_j < xm < y_next):
        return None
    al = float(F.alg_alpha_hat(stats.n, F.tail_sum(stats.n_L, stats.mean_ln_L, xm), beta))
    if not al > 1:
        return None
    return al, beta, xm, _ll(Family.ALG, stats, al, beta, xm, direct.ln_core(xm, beta))


def _alg_interior_free(stats, y_j, y_next, cfg, t0=None):
    """Interior alg maximum with beta optimised by the outer simplex."""
    direct = DirectCoreSums(stats.core)

    def g(t):
        beta = math.exp(max(t, math.log(ALG_BETA_MIN)))
        c = _alg_interior_at(stats, y_j, y_next, beta, direct, cfg)
        return math.inf if c is None else -c[3]

    if t0 is None:
        ts = np.log(ALG_BETA_GRID)
        vals = [g(t) for t in ts]
        if not np.isfinite(np.min(vals)):
            return None
        t0 = float(ts[int(np.argmin(vals))])
    elif not math.isfinite(g(t0)):
        return None
    t = nelder_mead_1d(g, t0, cfg, step=0.05)
    # an optimum on the edge of the beta range where the root exists is not stationary
    if t <= math.log(ALG_BETA_MIN) or not (math.isfinite(g(t - 1e-6)) and math.isfinite(g(t + 1e-6))):
        return None
    return _alg_interior_at(stats, y_j, y_next, math.exp(t), direct, cfg)


def _falg_interior(stats, y_j, y_next, cfg, x0=None, points=9):
    """Interior forced-alg maxima: roots of dlnL/dx_min with alpha re-solved at each x_min.

    By the envelope argument the total derivative equals the partial one,
    ``(-n + alpha n_L + alpha R)/x_min``. Sign changes are searched on a grid
    of ``points`` nodes (plus ``x0``) and refined by bisection.
    """
    direct = DirectCoreSums(stats.core)

    def alpha_at(xm):
        return _falg_alpha(stats, xm, F.tail_sum(stats.n_L, stats.mean_ln_L, xm), cfg, direct)

    def h(xm):
        try:
            al = alpha_at(xm)
        except MaxIterExceeded:
            return math.nan
        return float(-stats.n + al * stats.n_L + al * direct.ratio(xm, al))

    nodes = set(np.linspace(y_j, y_next, points).tolist())
    if x0 is not None and y_j < x0 < y_next:
        nodes.add(float(x0))
    nodes = sorted(nodes)
    vals = [h(x) for x in nodes]
    best = None
    for lo, hi, hl, hr in zip(nodes[:-1], nodes[1:], vals[:-1], vals[1:]):
        if not (hl > 0 and hr < 0):
            continue
        try:
            xm = bisect(h, lo, hi, cfg)
        except (NoSignChange, MaxIterExceeded):
            continue
        if not y_j < xm < y_next:
            continue
        al = alpha_at(xm)
        ll = _ll(Family.FORCED_ALG, stats, al, al, xm, direct.ln_core(xm, al))
        if best is None or ll > best[3]:
            best = (al, al, xm, ll)
    return best


def interior_candidate(family, stats: SplitStats, y_j: float, y_next: float, beta=None,
                       cfg: SolverConfig = DEFAULT):
    """Stationary point strictly inside ``[y_j, y_next)`` or ``None``.

    Returns ``(alpha, beta, x_min)``; ``beta`` is None for uni.
    """
    fam = Family(family)
    if fam is Family.UNI or stats.n_L < 1 or stats.n_S < 1:
        return None
    if fam is Family.ALG and beta is None:
        c = _alg_interior_free(stats, y_j, y_next, cfg)
    elif fam is Family.FORCED_ALG:
        c = _falg_interior(stats, y_j, y_next, cfg)
    else:
        tab = _one_row_table(stats, y_j, y_next)
        c = _scan_family(fam, tab, beta)
        inner = ~c.boundary
        if not inner.any():
            return None
        k = np.flatnonzero(inner)[int(np.argmax(c.loglik[inner]))]
        c = c.take(k)
    if c is None:
        return None
    al, bh, xm = c[0], c[1], c[2]
    if not (y_j <= xm < y_next and al > 1):
        return None
    return float(al), (None if fam is Family.UNI else float(bh)), float(xm)


# ---------------------------------------------------------------------------
# global fit


def _scan_family(fam: Family, tab: IntervalTable, beta=None) -> S.Candidates:
    if fam is Family.UNI:
        return S.scan_uni(tab)
    if fam is Family.POW:
        return S.scan_pow(tab, beta)
    if fam is Family.FORCED_POW:
        return S.scan_forced_pow(tab)
    if fam is Family.EXP:
        return S.scan_exp(tab, beta)
    if fam is Family.FORCED_EXP:
        return S.scan_forced_exp(tab)
    if fam is Family.ALG:
        return S.scan_alg(tab, beta)
    return S.scan_forced_alg(tab, beta)


def _best(c: S.Candidates):
    i = c.best_index()
    if i is None:
        raise NoValidFit("no candidate satisfied the constraints")
    return c.take(i)


def _outer_shape(fam: Family, tab: IntervalTable, cfg):
    """Best scan candidate over the free shape (alg beta or forced-alg alpha)."""
    grid = ALG_BETA_GRID if fam is Family.ALG else FALG_ALPHA_GRID
    shift = 0.0 if fam is Family.ALG else 1.0
    cache = {}

    def best_at(shape):
        if shape not in cache:
            c = _scan_family(fam, tab, shape)
            i = c.best_index()
            cache[shape] = None if i is None else c.take(i)
        return cache[shape]

    def g(t):
        shape = shift + math.exp(max(t, math.log(ALG_BETA_MIN)))
        b = best_at(shape)
        return math.inf if b is None else -b[3]

    ts = np.log(grid - shift)
    vals = [g(t) for t in ts]
    if not np.isfinite(np.min(vals)):
        raise NoValidFit(f"no admissible {fam.value} candidate")
    t = nelder_mead_1d(g, float(ts[int(np.argmin(vals))]), _OUTER_CFG, step=0.1)
    return best_at(shift + math.exp(max(t, math.log(ALG_BETA_MIN))))


def _boundary_exact(fam: Family, tab: IntervalTable, row: int, cfg):
    stats = tab.stats(row)
    y_j = float(tab.y[row])
    direct = DirectCoreSums(stats.core)
    if fam is Family.ALG:
        al, bh = fit_beta(fam, stats, y_j, cfg)
    else:
        al = bh = fit_alpha(fam, stats, y_j, cfg=cfg)
    return al, bh, y_j, _ll(fam, stats, al, bh, y_j, direct.ln_core(y_j, bh)), row, True


def _polish_row(fam: Family, tab: IntervalTable, row: int, boundary: bool, shape: float, x_min: float, cfg):
    """Exact re-optimisation with the winning row fixed.

    An interior winner is also compared with the boundary candidates at both
    ends of its interval. Returns ``(alpha, beta, x_min, loglik, row, boundary)``
    or None.
    """
    rows = [row] if boundary else [r for r in (row, row + 1) if r < len(tab)]
    cands = []
    for r in rows:
        try:
            cands.append(_boundary_exact(fam, tab, r, cfg))
        except (NoValidBeta, NoSolutionInRange, MaxIterExceeded, NoTailData):
            pass
    if not boundary:
        stats = tab.stats(row)
        y_j, y_next = float(tab.y[row]), float(tab.y_next[row])
        if fam is Family.ALG:
            c = _alg_interior_free(stats, y_j, y_next, cfg, t0=math.log(shape))
        else:
            c = _falg_interior(stats, y_j, y_next, cfg, x_min)
        if c is not None:
            cands.append((*c, row, False))
    if not cands:
        return None
    return max(cands, key=lambda c: (c[3], c[5]))


def _fit_shape_search(fam: Family, tab: IntervalTable, cfg):
    scan_best = _outer_shape(fam, tab, cfg)
    cur, best = scan_best, None
    for _ in range(_POLISH_ROUNDS):
        p = _polish_row(fam, tab, cur[4], cur[5], cur[1], cur[2], cfg)
        if p is not None and (best is None or p[3] > best[3]):
            best = p
        if best is None:
            return scan_best
        # does any row beat the polished optimum at its shape parameter?
        c = _scan_family(fam, tab, best[1])
        i = c.best_index()
        if i is None or c.loglik[i] <= best[3] + 1e-9:
            break
        cur = c.take(i)
    return best


def _notes(fam: Family, boundary: bool) -> tuple[str, ...]:
    if boundary:
        return ()
    key = {Family.POW: "pow-interior", Family.FORCED_EXP: "forced-exp-interior",
           Family.ALG: "alg-interior", Family.EXP: "exp-interior"}.get(fam)
    return (NOTES[key],) if key else ()


def _result(fam, sample, alpha, beta, x_min, boundary, notes=()):
    params = FamilyParams(fam, alpha, None if fam is Family.UNI else beta, x_min)
    stats = split_at(sample, params.x_min)
    j = int(np.searchsorted(sample.uniques, params.x_min, side="right"))
    return FitResult(params, log_likelihood(params, stats), sample.n, j if j >= 1 else None,
                     bool(boundary), tuple(notes))


def _check_beta(fam: Family, beta) -> None:
    # any alpha distinct from beta exercises only the beta bounds
    FamilyParams(fam, 1.5 if beta != 1.5 else 2.5, beta)


def fit(family, sample: SortedSample, cfg: SolverConfig = DEFAULT, beta=None) -> FitResult:
    """Global maximum-likelihood fit over every interval of unique values.

    ``beta`` pins the core exponent of a general family.
    """
    fam = Family(family)
    if beta is not None and not fam.has_free_beta:
        raise InvalidParams(f"{fam.value} does not take a pinned beta")
    if beta is not None:
        _check_beta(fam, beta)
    tab = interval_table(sample)
    if not len(tab):
        raise NoValidFit("need at least two distinct values")
    if fam in (Family.ALG, Family.FORCED_ALG) and beta is None:
        al, bh, xm, _, _, bnd = _fit_shape_search(fam, tab, cfg)
    else:
        al, bh, xm, _, row, bnd = _best(_scan_family(fam, tab, beta))
        if fam is Family.ALG and not bnd:
            stats = tab.stats(row)
            direct = DirectCoreSums(stats.core)
            c = _alg_interior_at(stats, float(tab.y[row]), float(tab.y_next[row]), beta, direct, cfg)
            if c is not None:
                al, bh, xm = c[0], c[1], c[2]
    if fam.forced:
        bh = al
    return _result(fam, sample, al, bh, xm, bnd, _notes(fam, bnd))


def fit_fixed_xmin(family, sample: SortedSample, x_min: float, beta=None,
                   cfg: SolverConfig = DEFAULT) -> FitResult:
    """Fit the remaining parameters with ``x_min`` held fixed."""
    fam = Family(family)
    if not (math.isfinite(x_min) and x_min > 0):
        raise InvalidParams(f"x_min must be > 0, got {x_min}")
    if beta is not None and not fam.has_free_beta:
        raise InvalidParams(f"{fam.value} does not take a pinned beta")
    if beta is not None:
        _check_beta(fam, beta)
    stats = split_at(sample, x_min)
    try:
        if fam.has_free_beta and beta is None:
            al, bh = fit_beta(fam, stats, x_min, cfg)
        else:
            al = fit_alpha(fam, stats, x_min, beta, cfg)
            bh = al if fam.forced else beta
    except (NoTailData, NoSolutionInRange, NoValidBeta, MaxIterExceeded) as exc:
        raise NoValidFit(str(exc)) from exc
    on_value = bool(np.any(sample.uniques == x_min))
    return _result(fam, sample, al, bh, x_min, on_value)
