"""Contact-degree model from thresholded correlated Gaussians.

Pairs ``(i, j)`` are linked when ``X_ij = sqrt(rho)(Z_i + Z_j) + sqrt(1 - 2 rho) Y_ij``
exceeds a threshold ``t``. For a large system of ``N`` nodes the degree
distribution is asymptotically::

    p_k = 1/(N-1) sqrt((1-rho)/rho)
          exp(-(1-2rho)/(2rho) y_k^2 + t y_k sqrt(1-rho)/rho - t^2/(2rho))

with ``y_k = Phi^{-1}(1 - k/(N-1))``. The approximation holds for ``k >= 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .distributions import make_rng
from .errors import DegenerateSample, DomainError, InvalidParams

__all__ = [
    "SantaFeParams",
    "DegreeSample",
    "SantaFeFit",
    "inv_norm_cdf",
    "pk",
    "loglik_santafe",
    "fit_santafe",
    "rho_hat",
    "sample_degrees",
]

RHO_MIN = 1e-8
RHO_EPS = 1e-9
_STD_NORMAL = NormalDist()


def inv_norm_cdf(p: float) -> float:
    """Standard normal quantile."""
    p = float(p)
    if not 0 < p < 1:
        raise DomainError(f"quantile needs 0 < p < 1, got {p}")
    return _STD_NORMAL.inv_cdf(p)


@dataclass(frozen=True)
class SantaFeParams:
    t: float
    rho: float
    N: int

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise InvalidParams(f"t must be finite, got {self.t}")
        if not 0 <= self.rho < 0.5:
            raise InvalidParams(f"rho must satisfy 0 <= rho < 1/2, got {self.rho}")
        if int(self.N) != self.N or self.N < 2:
            raise InvalidParams(f"N must be an integer >= 2, got {self.N}")
        object.__setattr__(self, "N", int(self.N))


@dataclass(frozen=True)
class DegreeSample:
    """Observed degrees and their latent Gaussian scores ``y_k``."""

    degrees: np.ndarray
    N: int
    y: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k = np.asarray(self.degrees)
        if k.size == 0:
            raise DegenerateSample("no degrees given")
        if not np.all(np.equal(np.mod(k, 1), 0)):
            raise DomainError("degrees must be integers")
        k = k.astype(np.int64)
        N = int(self.N)
        if N < 3:
            raise InvalidParams(f"N must be >= 3 to admit any degree, got {N}")
        bad = k[(k < 1) | (k > N - 2)]
        if bad.size:
            raise DomainError(
                f"degree {int(bad[0])} outside 1..{N - 2}; the asymptotic form "
                "is valid only for k > 0 and N >> 1")
        k.setflags(write=False)
        object.__setattr__(self, "degrees", k)
        object.__setattr__(self, "N", N)
        y = np.array([inv_norm_cdf(1 - v / (N - 1)) for v in k])
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def mean_y(self) -> float:
        return math.fsum(self.y) / self.n

    @property
    def mean_y2(self) -> float:
        return math.fsum(self.y * self.y) / self.n

    @property
    def var_y(self) -> float:
        m = self.mean_y
        return math.fsum((self.y - m) ** 2) / self.n


def _check_rho(params: SantaFeParams) -> None:
    if params.rho < RHO_MIN:
        raise InvalidParams(f"rho below {RHO_MIN} makes p_k diverge (got {params.rho})")


def _log_pk_y(params: SantaFeParams, y):
    t, r = params.t, params.rho
    return (-math.log(params.N - 1) + 0.5 * (math.log1p(-r) - math.log(r))
            - (1 - 2 * r) / (2 * r) * y * y + t * y * math.sqrt(1 - r) / r - t * t / (2 * r))


def pk(params: SantaFeParams, k: int) -> float:
    """Asymptotic probability of degree ``k`` (not normalised over k)."""
    _check_rho(params)
    if int(k) != k or not 1 <= k <= params.N - 2:
        raise DomainError(f"k must be an integer in 1..{params.N - 2}, got {k}")
    y = inv_norm_cdf(1 - k / (params.N - 1))
    return math.exp(_log_pk_y(params, y))


def loglik_santafe(params: SantaFeParams, degrees: DegreeSample) -> float:
    """``sum_i ln p_{k_i}`` written through the moments of ``y_k``."""
    _check_rho(params)
    if degrees.N != params.N:
        raise InvalidParams(f"degree sample uses N={degrees.N}, params use N={params.N}")
    n, t, r = degrees.n, params.t, params.rho
    return (-n * math.log(params.N - 1) + n * t * degrees.mean_y * math.sqrt(1 - r) / r
            - n * degrees.mean_y2 * (1 - 2 * r) / (2 * r)
            + 0.5 * n * (math.log1p(-r) - math.log(r)) - n * t * t / (2 * r))


@dataclass(frozen=True)
class SantaFeFit:
    t: float
    rho: float
    loglik: float
    # (t, loglik) for the +<y> and -<y> sign choices of t
    candidates: tuple[tuple[float, float], tuple[float, float]]
    sign_note: str


def rho_hat(y) -> float:
    """``var(y)/(var(y) + 1)`` clipped below 1/2."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise DegenerateSample("no scores given")
    m = math.fsum(y) / y.size
    var = math.fsum((y - m) ** 2) / y.size
    return min(var / (var + 1), 0.5 - RHO_EPS)


def fit_santafe(degrees: DegreeSample) -> SantaFeFit:
    """Closed-form maximum-likelihood ``(t, rho)``.

    ``rho = var(y)/(var(y) + 1)``; both signs of ``t = +-<y> sqrt(1 - rho)``
    are scored and the better one is returned. A sample with a single
    distinct degree gives ``rho = 0`` where the likelihood is undefined, so
    ``loglik`` is then nan.
    """
    rho = rho_hat(degrees.y)
    mag = degrees.mean_y * math.sqrt(1 - rho)
    if rho < RHO_MIN:
        return SantaFeFit(mag, rho, math.nan, ((mag, math.nan), (-mag, math.nan)),
                          "single distinct degree: rho = 0, likelihood undefined")
    cands = []
    for t in (mag, -mag):
        cands.append((t, loglik_santafe(SantaFeParams(t, rho, degrees.N), degrees)))
    best = max(range(2), key=lambda i: (cands[i][1], -i))
    note = ("t = +<y> sqrt(1 - rho) maximises the likelihood"
            if best == 0 else "t = -<y> sqrt(1 - rho) maximises the likelihood")
    return SantaFeFit(cands[best][0], rho, cands[best][1], tuple(cands), note)


def sample_degrees(params: SantaFeParams, count: int, seed: int) -> np.ndarray:
    """Draw degrees from ``p_k`` renormalised over ``k = 1 .. N-2``."""
    _check_rho(params)
    if count < 0:
        raise InvalidParams(f"count must be >= 0, got {count}")
    k = np.arange(1, params.N - 1)
    y = np.array([inv_norm_cdf(1 - v / (params.N - 1)) for v in k])
    logp = _log_pk_y(params, y)
    p = np.exp(logp - logp.max())
    return make_rng(seed).choice(k, size=count, p=p / p.sum())
