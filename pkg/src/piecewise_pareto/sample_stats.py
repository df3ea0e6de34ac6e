"""Validated, sorted observations and constant-time split statistics.

Every estimator works on the split of a sample at a threshold ``x_min`` into a
core set ``S = {x <= x_min}`` and a tail set ``L = {x > x_min}``. The sample
stores compensated prefix (and suffix) sums so that the means over both sets
can be read off in ``O(log n)`` for any threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import EmptyInput, NonPositiveValue, ParseError

__all__ = [
    "SortedSample",
    "SplitStats",
    "IntervalTable",
    "build_sample",
    "read_observations",
    "split_at",
    "interval_iter",
    "interval_table",
]


def _compensated_cumsum(a: np.ndarray) -> np.ndarray:
    """Running sums with Neumaier compensation; ``out[k] = sum(a[:k])``."""
    out = np.empty(len(a) + 1)
    out[0] = 0.0
    s = 0.0
    c = 0.0
    for k, v in enumerate(a.tolist(), start=1):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[k] = s + c
    return out


@dataclass(frozen=True, eq=False)
class SortedSample:
    """Immutable sorted sample.

    ``prefix_ln[k]`` and ``prefix_x[k]`` hold the sums of ``ln x`` and ``x``
    over the ``k`` smallest observations (so both arrays have length
    ``n + 1``). ``suffix_ln[k]`` is the sum of ``ln x`` over ``values[k:]``;
    tail means use it directly to avoid subtracting two large prefix sums.
    """

    values: np.ndarray
    uniques: np.ndarray
    prefix_ln: np.ndarray
    prefix_x: np.ndarray
    suffix_ln: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.uniques)

    def count_le(self, x_min):
        """Number of observations ``<= x_min`` (vectorised over ``x_min``)."""
        return np.searchsorted(self.values, x_min, side="right")


@dataclass(frozen=True)
class SplitStats:
    """Sufficient statistics of the split at one threshold.

    Means over an empty set are ``nan``. ``core`` is a read-only view of the
    observations in ``S``; only the algebraic core needs it.
    """

    n: int
    n_L: int
    n_S: int
    mean_ln_L: float
    mean_ln_S: float
    mean_x_S: float
    core: np.ndarray

    def mean_ln_ratio_L(self, x_min: float) -> float:
        """``<ln(x/x_min)>`` over the tail set."""
        return self.mean_ln_L - math.log(x_min)


def build_sample(raw: Iterable[float]) -> SortedSample:
    """Validate ``raw`` and build a :class:`SortedSample`.

    Non-finite entries are dropped. Values ``<= 0`` are rejected because the
    core log-averages diverge there.
    """
    arr = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=float).ravel()
    arr = arr[np.isfinite(arr)]
    if arr.size < 2:
        raise EmptyInput(f"need at least 2 finite observations, got {arr.size}")
    bad = arr[arr <= 0]
    if bad.size:
        raise NonPositiveValue(f"observations must be > 0, found {bad[0]!r}")
    values = np.sort(arr)
    uniques = np.unique(values)
    if uniques.size < 2:
        raise EmptyInput("need at least 2 distinct observation values")
    values.flags.writeable = False
    uniques.flags.writeable = False
    logs = np.log(values)
    prefix_ln = _compensated_cumsum(logs)
    prefix_x = _compensated_cumsum(values)
    suffix_ln = _compensated_cumsum(logs[::-1])[::-1].copy()
    for a in (prefix_ln, prefix_x, suffix_ln):
        a.flags.writeable = False
    return SortedSample(values, uniques, prefix_ln, prefix_x, suffix_ln)


def read_observations(path, kind=float) -> list:
    """Parse the shared text format: one number per line, ``#`` comments."""
    out = []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            out.append(kind(s))
        except ValueError:
            raise ParseError(f"cannot parse {s!r} as {kind.__name__}", line=lineno) from None
    if not out:
        raise EmptyInput(f"{path}: no observations")
    return out


def _stats_at_count(sample: SortedSample, n_S: int) -> SplitStats:
    n = sample.n
    n_L = n - n_S
    mean_ln_S = sample.prefix_ln[n_S] / n_S if n_S else math.nan
    mean_x_S = sample.prefix_x[n_S] / n_S if n_S else math.nan
    mean_ln_L = sample.suffix_ln[n_S] / n_L if n_L else math.nan
    return SplitStats(n, n_L, n_S, float(mean_ln_L), float(mean_ln_S), float(mean_x_S),
                      sample.values[:n_S])


def split_at(sample: SortedSample, x_min: float) -> SplitStats:
    """Split statistics at ``x_min``; an observation equal to ``x_min`` is in ``S``."""
    return _stats_at_count(sample, int(sample.count_le(x_min)))


def interval_iter(sample: SortedSample) -> Iterator[tuple[int, float, float, SplitStats]]:
    """Yield ``(j, y_j, y_{j+1}, stats)`` for ``j = 1 .. m-1`` (1-based)."""
    y = sample.uniques
    counts = sample.count_le(y)
    for j in range(len(y) - 1):
        yield j + 1, float(y[j]), float(y[j + 1]), _stats_at_count(sample, int(counts[j]))


@dataclass(frozen=True)
class IntervalTable:
    """Split statistics of every interval ``[y_j, y_{j+1})`` as parallel arrays.

    Row ``i`` corresponds to ``j = i + 1``.
    """

    sample: SortedSample
    y: np.ndarray
    y_next: np.ndarray
    n_S: np.ndarray
    n_L: np.ndarray
    mean_ln_L: np.ndarray
    mean_ln_S: np.ndarray
    mean_x_S: np.ndarray

    @property
    def n(self) -> int:
        return self.sample.n

    def __len__(self) -> int:
        return len(self.y)

    def subset(self, idx) -> "IntervalTable":
        return IntervalTable(self.sample, *(getattr(self, f)[idx] for f in
                             ("y", "y_next", "n_S", "n_L", "mean_ln_L", "mean_ln_S", "mean_x_S")))

    def stats(self, i: int) -> SplitStats:
        return _stats_at_count(self.sample, int(self.n_S[i]))


def interval_table(sample: SortedSample) -> IntervalTable:
    y = sample.uniques[:-1]
    y_next = sample.uniques[1:]
    n_S = sample.count_le(y)
    n_L = sample.n - n_S
    return IntervalTable(
        sample, y, y_next, n_S.astype(float), n_L.astype(float),
        sample.suffix_ln[n_S] / n_L,
        sample.prefix_ln[n_S] / n_S,
        sample.prefix_x[n_S] / n_S,
    )
