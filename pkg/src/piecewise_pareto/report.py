"""Command implementations: fitting reports, sampling, tables and histograms.

Every command is a pure function of its inputs and writes text to a path or
to a stream. Floats are written with 17 significant digits so that numbers
round-trip exactly.
"""
from __future__ import annotations

import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import distributions as D
from .distributions import Family, FamilyParams
from .errors import DomainError, EmptyInput, InvalidParams, NonPositiveValue, NoValidFit
from .estimators import FitResult, fit, fit_fixed_xmin
from .sample_stats import build_sample, read_observations
from .santafe import DegreeSample, SantaFeFit, fit_santafe

__all__ = ["FitEntry", "FitReport", "cmd_fit", "cmd_sample", "cmd_tabulate", "cmd_hist",
           "cmd_santafe", "dumps", "format_float"]

FAMILY_ORDER = tuple(Family)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with 17-significant-digit floats; nan and inf become null."""
    return _encode(obj) + "\n"


def _write(text: str, output) -> None:
    if output is None:
        sys.stdout.write(text)
    elif isinstance(output, io.TextIOBase):
        output.write(text)
    else:
        Path(output).write_text(text)


# ---------------------------------------------------------------------------
# fit


@dataclass(frozen=True)
class FitEntry:
    family: Family
    result: FitResult | None
    error: str | None = None
    pinned_xmin: bool = False
    pinned_beta: bool = False

    def to_dict(self) -> dict:
        d = {"family": self.family.value}
        if self.result is None:
            d["error"] = self.error
            return d
        r = self.result
        d.update(alpha=r.params.alpha, beta=r.params.beta, xmin=r.params.x_min, loglik=r.loglik,
                 aic=r.aic, bic=r.bic, at_boundary=r.at_boundary, interval_index=r.interval_index,
                 pinned_xmin=self.pinned_xmin, pinned_beta=self.pinned_beta)
        return d


@dataclass(frozen=True)
class FitReport:
    n: int
    entries: tuple[FitEntry, ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ranking(self) -> list[Family]:
        """Successful families sorted by ascending AIC (family order breaks ties)."""
        ok = [e for e in self.entries if e.result is not None]
        ok.sort(key=lambda e: (e.result.aic, FAMILY_ORDER.index(e.family)))
        return [e.family for e in ok]

    @property
    def best_family(self) -> Family | None:
        r = self.ranking
        return r[0] if r else None

    def result(self, family) -> FitResult | None:
        fam = Family(family)
        for e in self.entries:
            if e.family is fam:
                return e.result
        return None

    def to_dict(self) -> dict:
        best = self.best_family
        return {
            "n": self.n,
            "results": [e.to_dict() for e in self.entries],
            "ranking": [f.value for f in self.ranking],
            "best_family": best.value if best else None,
            "errata_notes": list(self.notes),
        }


def _parse_families(families) -> list[Family]:
    if families is None or families == "all" or families == ["all"]:
        return list(FAMILY_ORDER)
    if isinstance(families, (str, Family)):
        families = [families]
    try:
        chosen = {Family(f) for f in families}
    except ValueError as exc:
        raise InvalidParams(str(exc)) from None
    return [f for f in FAMILY_ORDER if f in chosen]


def fit_report(sample, families="all", x_min=None, beta=None) -> FitReport:
    fams = _parse_families(families)
    if beta is not None:
        general = [f for f in fams if f.has_free_beta]
        if not general:
            raise InvalidParams("--beta applies only to the pow, exp and alg families")
        for fam in general:
            # alpha is a placeholder distinct from beta; only the beta bounds are checked
            FamilyParams(fam, 1.5 if beta != 1.5 else 2.5, beta)
    entries, notes = [], []
    for fam in fams:
        b = beta if fam.has_free_beta else None
        try:
            if x_min is not None:
                res = fit_fixed_xmin(fam, sample, x_min, beta=b)
            else:
                res = fit(fam, sample, beta=b)
        except NoValidFit as exc:
            entries.append(FitEntry(fam, None, f"{type(exc).__name__}: {exc}"))
            continue
        entries.append(FitEntry(fam, res, None, x_min is not None, b is not None))
        notes.extend(n for n in res.branch_notes if n not in notes)
    return FitReport(sample.n, tuple(entries), tuple(notes))


def cmd_fit(input_path, families="all", x_min=None, beta=None, output_path=None) -> FitReport:
    """Fit the requested families to a data file and write a JSON report.

    Per-family failures are recorded in the report rather than raised.
    """
    sample = build_sample(read_observations(input_path))
    report = fit_report(sample, families, x_min, beta)
    _write(dumps(report.to_dict()), output_path)
    return report


# ---------------------------------------------------------------------------
# sample / tabulate / hist


def cmd_sample(family, alpha, beta, x_min, count, seed, output_path=None) -> np.ndarray:
    params = FamilyParams(family, alpha, beta, x_min)
    if count < 0:
        raise InvalidParams(f"count must be >= 0, got {count}")
    xs = D.sample(params, count, seed)
    _write("".join(format_float(x) + "\n" for x in xs), output_path)
    return xs


def tabulate(params: FamilyParams, x_max: float, points: int, spacing: str = "log"):
    """``(x, pdf, cdf)`` arrays on a log grid from ``x_min/1000`` or a linear grid from 0."""
    if points < 2:
        raise InvalidParams(f"points must be >= 2, got {points}")
    if spacing == "log":
        lo = params.x_min * 1e-3
        if not x_max > lo:
            raise InvalidParams(f"xmax must exceed x_min*1e-3 = {lo}")
        x = np.geomspace(lo, x_max, points)
    elif spacing == "linear":
        if not x_max > 0:
            raise InvalidParams("xmax must be > 0")
        x = np.linspace(0.0, x_max, points)
    else:
        raise InvalidParams(f"spacing must be 'log' or 'linear', got {spacing!r}")
    pos = x > 0
    dens = np.full_like(x, math.inf)
    dens[pos] = D.pdf(params, x[pos])
    if not pos.all():
        try:
            dens[~pos] = D.pdf(params, 0.0)
        except DomainError:
            pass  # pow core with beta < 0 diverges at 0
    return x, dens, np.asarray(D.cdf(params, x), dtype=float)


def cmd_tabulate(family, alpha, beta, x_min, x_max, points, spacing="log", output_path=None):
    params = FamilyParams(family, alpha, beta, x_min)
    x, dens, cum = tabulate(params, x_max, points, spacing)
    lines = ["x,pdf,cdf\n"]
    lines += [f"{format_float(a)},{format_float(b)},{format_float(c)}\n" for a, b, c in zip(x, dens, cum)]
    _write("".join(lines), output_path)
    return x, dens, cum


def log_histogram(values, bins_per_decade: int):
    """Occupied logarithmic bins: ``(centers, densities, widths)``.

    Bin ``i`` spans ``[10^(i/B), 10^((i+1)/B))``; densities are normalised so
    that ``sum(density * width) == 1``.
    """
    if int(bins_per_decade) != bins_per_decade or bins_per_decade < 1:
        raise InvalidParams(f"bins_per_decade must be a positive integer, got {bins_per_decade}")
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise EmptyInput("no observations")
    bad = x[~(np.isfinite(x) & (x > 0))]
    if bad.size:
        raise NonPositiveValue(f"log binning needs finite values > 0, found {bad[0]!r}")
    B = int(bins_per_decade)
    idx = np.floor(B * np.log10(x)).astype(np.int64)
    lo_edge = 10.0 ** (idx / B)
    # guard the rounding of log10 at bin edges
    idx = np.where(x < lo_edge, idx - 1, idx)
    idx = np.where(x >= 10.0 ** ((idx + 1) / B), idx + 1, idx)
    occupied, counts = np.unique(idx, return_counts=True)
    left = 10.0 ** (occupied / B)
    right = 10.0 ** ((occupied + 1) / B)
    widths = right - left
    return np.sqrt(left * right), counts / (x.size * widths), widths


def cmd_hist(input_path, bins_per_decade: int, output_path=None):
    values = read_observations(input_path)
    centers, dens, _ = log_histogram(values, bins_per_decade)
    lines = ["bin_center,density\n"]
    lines += [f"{format_float(c)},{format_float(d)}\n" for c, d in zip(centers, dens)]
    _write("".join(lines), output_path)
    return centers, dens


# ---------------------------------------------------------------------------
# santafe


def cmd_santafe(input_path, N: int, output_path=None) -> SantaFeFit:
    degrees = DegreeSample(np.asarray(read_observations(input_path, kind=int)), N)
    res = fit_santafe(degrees)
    doc = {
        "n": degrees.n,
        "N": degrees.N,
        "t_hat": res.t,
        "rho_hat": res.rho,
        "loglik": res.loglik,
        "candidates": [{"t": t, "loglik": ll} for t, ll in res.candidates],
        "sign_note": res.sign_note,
    }
    _write(dumps(doc), output_path)
    return res

