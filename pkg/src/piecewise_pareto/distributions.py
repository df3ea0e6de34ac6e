"""Piecewise Pareto densities with a finite, non-zero core.

All seven families share the form::

    p(x) = C * core(x / x_min)     for 0 <= x <= x_min
    p(x) = C * (x_min / x)**alpha  for x > x_min

with one of three core shapes (``u = x / x_min``)::

    pow:  u**beta
    exp:  exp(-beta * (u - 1))
    alg:  2 - u**beta

The uniform core is the pow core with ``beta = 0``; the *forced* families tie
``beta = alpha``, which makes the density continuously differentiable at
``x_min``. The private ``_*`` helpers below are vectorised over their
arguments and are shared with the estimators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InvalidParams, MomentUndefined
from .sample_stats import SplitStats
from .solvers import newton_vec

__all__ = [
    "Family",
    "FamilyParams",
    "normalization",
    "pdf",
    "cdf",
    "icdf",
    "sample",
    "mean",
    "second_moment",
    "tail_mass",
    "log_likelihood",
    "make_rng",
]

EXP_BETA_MIN = 1e-8


class Family(str, Enum):
    UNI = "uni"
    POW = "pow"
    FORCED_POW = "forced-pow"
    EXP = "exp"
    FORCED_EXP = "forced-exp"
    ALG = "alg"
    FORCED_ALG = "forced-alg"

    @property
    def core(self) -> str:
        if self is Family.UNI:
            return "pow"
        return self.value.split("-")[-1]

    @property
    def forced(self) -> bool:
        return self.value.startswith("forced")

    @property
    def has_free_beta(self) -> bool:
        return self in (Family.POW, Family.EXP, Family.ALG)

    @property
    def n_params(self) -> int:
        return 3 if self.has_free_beta else 2


@dataclass(frozen=True)
class FamilyParams:
    """Validated parameter set.

    ``beta`` is ``None`` for the uniform core and is set to ``alpha`` for the
    forced families when omitted.
    """

    family: Family
    alpha: float
    beta: float | None = None
    x_min: float = 1.0

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        a, xm = float(self.alpha), float(self.x_min)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "x_min", xm)
        if not (math.isfinite(a) and a > 1):
            raise InvalidParams(f"alpha must be > 1, got {a}")
        if not (math.isfinite(xm) and xm > 0):
            raise InvalidParams(f"x_min must be > 0, got {xm}")
        b = self.beta
        if fam is Family.UNI:
            if b not in (None, 0, 0.0):
                raise InvalidParams("uni family takes no beta")
            object.__setattr__(self, "beta", None)
            return
        if fam.forced:
            if b is not None and float(b) != a:
                raise InvalidParams(f"{fam.value} requires beta == alpha, got beta={b}")
            object.__setattr__(self, "beta", a)
            return
        if b is None:
            raise InvalidParams(f"{fam.value} requires beta")
        b = float(b)
        object.__setattr__(self, "beta", b)
        if not math.isfinite(b):
            raise InvalidParams(f"beta must be finite, got {b}")
        if fam is Family.POW and not b > -1:
            raise InvalidParams(f"pow requires beta > -1, got {b}")
        if fam is Family.EXP:
            if abs(b) < EXP_BETA_MIN:
                raise InvalidParams(f"exp requires |beta| >= {EXP_BETA_MIN}, got {b}")
            if b == a:
                raise InvalidParams("exp requires beta != alpha (use forced-exp)")
        if fam is Family.ALG and not b > 0:
            raise InvalidParams(f"alg requires beta > 0, got {b}")

    @property
    def shape(self) -> float:
        """Core exponent actually used by the density."""
        return 0.0 if self.beta is None else self.beta

    @property
    def core(self) -> str:
        return self.family.core


# ---------------------------------------------------------------------------
# vectorised helpers on (core kind, alpha, beta)


def _exp_log_absD(a, b):
    """``ln |(a-1)(e^b - 1) + b|`` without overflow for large positive ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(all="ignore"):
        bp = np.maximum(b, 0.0)
        pos = bp + np.log((a - 1) * -np.expm1(-bp) + bp * np.exp(-bp))
        bn = np.minimum(b, 0.0)
        neg = np.log(-((a - 1) * np.expm1(bn) + bn))
    return np.where(b > 0, pos, neg)


def _log_tail_weight(kind, a, b):
    """``ln((1 - F(x_min)))``: probability mass of the tail region."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(all="ignore"):
        if kind == "pow":
            return np.log(b + 1) - np.log(a + b)
        if kind == "alg":
            return np.log(b + 1) - np.log(2 * a * b + a - b)
        if kind == "exp":
            val = np.log(np.abs(b)) - _exp_log_absD(a, b)
            return np.where(b == 0, -np.log(a), val)
    raise ValueError(kind)


def _log_norm(kind, a, b, xm):
    """``ln C`` for the given core; ``C * x_min = (a - 1) * tail weight``."""
    with np.errstate(all="ignore"):
        return np.log(np.asarray(a, dtype=float) - 1) + _log_tail_weight(kind, a, b) - np.log(xm)


def _core_mass(kind, a, b):
    """``F(x_min)``."""
    return -np.expm1(_log_tail_weight(kind, a, b))


def _exp_core_ratio(u, b):
    """``(1 - e^{-b u}) / (1 - e^{-b})`` for ``u`` in [0, 1]; ``u`` at ``b = 0``."""
    u = np.asarray(u, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(all="ignore"):
        bp = np.where(b > 0, b, 1.0)
        pos = np.expm1(-bp * u) / np.expm1(-bp)
        c = np.where(b < 0, -b, 1.0)
        neg = np.exp(c * (u - 1)) * np.expm1(-c * u) / np.expm1(-c)
    return np.where(b > 0, pos, np.where(b < 0, neg, u))


def _exp_core_ratio_inv(t, b):
    """Inverse of :func:`_exp_core_ratio` in ``u``."""
    t = np.asarray(t, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(all="ignore"):
        bp = np.where(b > 0, b, 1.0)
        pos = -np.log1p(t * np.expm1(-bp)) / bp
        c = np.where(b < 0, -b, 1.0)
        neg = np.log1p(t * np.expm1(c)) / c
    return np.where(b > 0, pos, np.where(b < 0, neg, t))


def _alg_core_cdf(u, b):
    """Core cdf of the alg shape normalised to 1 at ``u = 1``."""
    return u * (2 * b + 2 - u ** b) / (2 * b + 1)


def _alg_core_icdf(t, b):
    t = np.asarray(t, dtype=float)
    b = np.broadcast_to(np.asarray(b, dtype=float), t.shape)
    u0 = np.clip(t * (2 * b + 1) / (2 * b + 2), 0.0, 1.0)
    return newton_vec(
        lambda u: t - _alg_core_cdf(u, b),
        lambda u: -(b + 1) * (2 - u ** b) / (2 * b + 1),
        u0, np.zeros_like(t), np.ones_like(t), n_iter=100,
    )


def _exp_series_e1(b):
    """``(e^b - 1 - b) / b^2`` (core first moment helper)."""
    b = np.asarray(b, dtype=float)
    small = np.abs(b) < 0.5
    bs = np.where(small, b, 0.0)
    ser = sum(bs ** j / math.factorial(j + 2) for j in range(18))
    with np.errstate(all="ignore"):
        direct = (np.expm1(b) - b) / b ** 2
    return np.where(small, ser, direct)


def _exp_series_e2(b):
    """``(2 e^b - b^2 - 2b - 2) / (2 b^3)``."""
    b = np.asarray(b, dtype=float)
    small = np.abs(b) < 0.5
    bs = np.where(small, b, 0.0)
    ser = sum(bs ** j / math.factorial(j + 3) for j in range(18))
    with np.errstate(all="ignore"):
        direct = (2 * np.expm1(b) - b * b - 2 * b) / (2 * b ** 3)
    return np.where(small, ser, direct)


def _loglik_terms(kind, a, b, xm, n, n_L, mean_ln_L, n_S, mean_ln_S=None, mean_x_S=None,
                  core_sum=None):
    """Sufficient-statistic log-likelihood, vectorised over every argument.

    ``core_sum`` is ``sum_S ln(2 - (x/x_min)^b)`` and is required for ``alg``.
    """
    with np.errstate(all="ignore"):
        ln_xm = np.log(xm)
        tail = np.where(n_L > 0, n_L * (mean_ln_L - ln_xm), 0.0)
        ll = n * _log_norm(kind, a, b, xm) - a * tail
        if kind == "pow":
            core = np.where(n_S > 0, b * n_S * (mean_ln_S - ln_xm), 0.0)
        elif kind == "exp":
            core = np.where(n_S > 0, -b * n_S * (mean_x_S / xm - 1), 0.0)
        else:
            core = core_sum
        return ll + core


# ---------------------------------------------------------------------------
# public evaluation API


def _kab(params: FamilyParams):
    return params.core, params.alpha, params.shape, params.x_min


def normalization(params: FamilyParams) -> float:
    return float(np.exp(_log_norm(*_kab(params))))


def tail_mass(params: FamilyParams, x) -> np.ndarray | float:
    """``P(X > x)`` for ``x >= x_min`` from the closed-form tail integral."""
    kind, a, b, xm = _kab(params)
    x = np.asarray(x, dtype=float)
    out = np.exp(_log_tail_weight(kind, a, b)) * (xm / x) ** (a - 1)
    return float(out) if out.ndim == 0 else out


def pdf(params: FamilyParams, x):
    kind, a, b, xm = _kab(params)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("pdf is defined for x >= 0")
    if kind == "pow" and b < 0 and np.any(x == 0):
        raise DomainError(f"pow core with beta={b} < 0 is singular at x=0")
    C = normalization(params)
    u = x / xm
    with np.errstate(all="ignore"):
        if kind == "pow":
            core = u ** b
        elif kind == "exp":
            core = np.exp(-b * (u - 1))
        else:
            core = 2 - u ** b
        out = np.where(x <= xm, C * core, C * np.where(x > 0, 1 / u, 0.0) ** a)
    return float(out) if out.ndim == 0 else out


def cdf(params: FamilyParams, x):
    kind, a, b, xm = _kab(params)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("cdf is defined for x >= 0")
    Fm = _core_mass(kind, a, b)
    u = np.minimum(x / xm, 1.0)
    if kind == "pow":
        core = Fm * u ** (b + 1)
    elif kind == "exp":
        core = Fm * _exp_core_ratio(u, b)
    else:
        core = Fm * _alg_core_cdf(u, b)
    with np.errstate(all="ignore"):
        tail = 1 - (1 - Fm) * (xm / np.maximum(x, xm)) ** (a - 1)
    out = np.where(x <= xm, core, tail)
    return float(out) if out.ndim == 0 else out


def icdf(params: FamilyParams, q):
    """Quantile function; ``q`` in ``[0, 1)``."""
    kind, a, b, xm = _kab(params)
    q = np.asarray(q, dtype=float)
    if np.any((q < 0) | (q >= 1)) or np.any(np.isnan(q)):
        raise DomainError("icdf requires 0 <= q < 1")
    Fm = float(_core_mass(kind, a, b))
    t = np.minimum(q / Fm, 1.0)
    if kind == "pow":
        u = t ** (1 / (b + 1))
    elif kind == "exp":
        u = _exp_core_ratio_inv(t, b)
    else:
        u = _alg_core_icdf(t, b)
    tail = xm * ((1 - Fm) / (1 - np.maximum(q, Fm))) ** (1 / (a - 1))
    out = np.where(q <= Fm, xm * u, tail)
    return float(out) if out.ndim == 0 else out


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator; uniform variates come from ``random()``."""
    return np.random.Generator(np.random.Philox(seed))


def sample(params: FamilyParams, count: int, seed: int) -> np.ndarray:
    """``count`` variates by inverse transform of ``U[0, 1)`` draws."""
    if count < 1:
        raise InvalidParams("count must be >= 1")
    q = make_rng(seed).random(count)
    return np.asarray(icdf(params, q), dtype=float).reshape(count)


def mean(params: FamilyParams) -> float:
    kind, a, b, xm = _kab(params)
    if not a > 2:
        raise MomentUndefined(f"mean is infinite for alpha={a} <= 2")
    w = (a - 1) * math.exp(float(_log_tail_weight(kind, a, b)))    # C * x_min
    if kind == "pow":
        core = 1 / (b + 2)
    elif kind == "alg":
        core = (b + 1) / (b + 2)
    else:
        return xm * float(np.exp(np.log(w) + _log_e_core(b, 1))) + xm * w / (a - 2)
    return xm * w * (core + 1 / (a - 2))


def second_moment(params: FamilyParams) -> float:
    kind, a, b, xm = _kab(params)
    if not a > 3:
        raise MomentUndefined(f"second moment is infinite for alpha={a} <= 3")
    w = (a - 1) * math.exp(float(_log_tail_weight(kind, a, b)))
    if kind == "pow":
        core = 1 / (b + 3)
    elif kind == "alg":
        core = (2 * b + 3) / (3 * (b + 3))
    else:
        return xm ** 2 * float(np.exp(np.log(w) + _log_e_core(b, 2))) + xm ** 2 * w / (a - 3)
    return xm ** 2 * w * (core + 1 / (a - 3))


def _log_e_core(b, k):
    """``ln int_0^1 u^k e^{b(1-u)} du`` for k = 1, 2, stable for large ``b``."""
    if b > 30:
        if k == 1:
            return b + math.log1p(-(1 + b) * math.exp(-b)) - 2 * math.log(b)
        return b + math.log(2) + math.log1p(-(b * b + 2 * b + 2) * math.exp(-b) / 2) - 3 * math.log(b)
    if k == 1:
        return math.log(float(_exp_series_e1(b)))
    return math.log(2 * float(_exp_series_e2(b)))


def log_likelihood(params: FamilyParams, stats: SplitStats) -> float:
    """Log-likelihood from split statistics taken at ``params.x_min``."""
    kind, a, b, xm = _kab(params)
    core_sum = None
    if kind == "alg":
        core_sum = float(np.sum(np.log(2 - (stats.core / xm) ** b))) if stats.n_S else 0.0
    ll = _loglik_terms(kind, a, b, xm, stats.n, stats.n_L, stats.mean_ln_L, stats.n_S,
                       stats.mean_ln_S, stats.mean_x_S, core_sum)
    return float(ll)
