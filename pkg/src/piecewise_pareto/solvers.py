"""Small root finders and a one-dimensional simplex minimiser.

The scalar routines (:func:`bisect`, :func:`newton`, :func:`nelder_mead_1d`)
raise on failure. The ``*_vec`` variants run a fixed number of safeguarded
iterations on whole arrays of independent problems and never raise; the
caller masks out rows it cannot use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MaxIterExceeded, NoSignChange

__all__ = ["SolverConfig", "bisect", "newton", "nelder_mead_1d", "bisect_vec", "illinois_vec", "newton_vec"]


@dataclass(frozen=True)
class SolverConfig:
    tol_x: float = 1e-10       # relative
    tol_f: float = 1e-12
    max_iter: int = 200
    nm_reflect: float = 1.0
    nm_expand: float = 2.0
    nm_contract: float = 0.5
    nm_shrink: float = 0.5

    def __post_init__(self):
        if not (self.tol_x > 0 and self.tol_f > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


DEFAULT = SolverConfig()


def _width_ok(lo, hi, cfg):
    return abs(hi - lo) <= cfg.tol_x * max(1.0, abs(lo), abs(hi))


def bisect(f, lo: float, hi: float, cfg: SolverConfig = DEFAULT) -> float:
    """Root of ``f`` in ``[lo, hi]`` by bisection; requires ``f(lo) * f(hi) < 0``
    (an exact zero at either end is returned as is)."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not (flo * fhi < 0):
        raise NoSignChange(f"f({lo})={flo}, f({hi})={fhi}")
    for _ in range(cfg.max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or abs(fm) <= cfg.tol_f or _width_ok(lo, hi, cfg):
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise MaxIterExceeded("bisection did not converge")


def newton(f, fprime, x0: float, bracket: tuple[float, float], cfg: SolverConfig = DEFAULT) -> float:
    """Newton's method safeguarded by a bracket.

    Steps that leave the current bracket, or land on a flat derivative, are
    replaced by bisection. The bracket is tightened from the sign of ``f``
    whenever the end points have opposite signs; otherwise it only clips.
    """
    lo, hi = bracket
    flo, fhi = f(lo), f(hi)
    signed = flo * fhi < 0
    x = min(max(x0, lo), hi)
    for _ in range(cfg.max_iter):
        fx = f(x)
        if fx == 0 or abs(fx) <= cfg.tol_f:
            return x
        if signed:
            if (fx < 0) == (flo < 0):
                lo, flo = x, fx
            else:
                hi = x
        d = fprime(x)
        step_ok = d != 0 and math.isfinite(d)
        x_new = x - fx / d if step_ok else math.nan
        if not (lo < x_new < hi) or not math.isfinite(x_new):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= cfg.tol_x * max(1.0, abs(x)):
            return x_new
        x = x_new
    raise MaxIterExceeded(f"newton did not converge from x0={x0}")


def nelder_mead_1d(g, x0: float, cfg: SolverConfig = DEFAULT, step: float | None = None) -> float:
    """Minimise ``g`` over the real line with a two-point simplex."""
    if step is None:
        step = 0.1 * abs(x0) if x0 != 0 else 0.1
    a, b = x0, x0 + step
    fa, fb = g(a), g(b)
    for _ in range(cfg.max_iter * 5):
        if fb < fa:
            a, b, fa, fb = b, a, fb, fa
        # a is best, b is worst
        if abs(b - a) <= cfg.tol_x * max(1.0, abs(a)):
            return a
        xr = a + cfg.nm_reflect * (a - b)
        fr = g(xr)
        if fr < fa:
            xe = a + cfg.nm_expand * (a - b)
            fe = g(xe)
            if fe < fr:
                b, fb = xe, fe
            else:
                b, fb = xr, fr
        elif fr < fb:
            b, fb = xr, fr
        else:
            xc = a + cfg.nm_contract * (b - a)
            fc = g(xc)
            if fc < fb:
                b, fb = xc, fc
            else:
                b = a + cfg.nm_shrink * (b - a)
                fb = g(b)
    raise MaxIterExceeded("nelder-mead did not converge")


def bisect_vec(f, lo, hi, n_iter: int = 64):
    """Bisect many bracketed problems at once.

    ``f`` maps an array of abscissae (aligned with ``lo``/``hi``) to values.
    Only the sign of ``f(lo)`` is used to orient each bracket.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    s_lo = np.sign(f(lo))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        left = np.sign(fm) == s_lo
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def illinois_vec(f, lo, hi, n_iter: int = 80, rtol: float = 1e-15):
    """Regula falsi with the Illinois modification on many brackets at once.

    Same contract as :func:`bisect_vec` but superlinear; rows stop moving once
    their bracket has shrunk below ``rtol`` relative to the end points.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    with np.errstate(all="ignore"):
        fa = np.asarray(f(a), dtype=float)
        fb = np.asarray(f(b), dtype=float)
        side = np.zeros(a.shape, dtype=int)
        for _ in range(n_iter):
            c = (a * fb - b * fa) / (fb - fa)
            c = np.where(np.isfinite(c) & (c > np.minimum(a, b)) & (c < np.maximum(a, b)), c, 0.5 * (a + b))
            fc = np.asarray(f(c), dtype=float)
            same_b = np.sign(fc) == np.sign(fb)
            # replace b when fc shares its sign, else a
            a_new = np.where(same_b, a, b)
            fa_new = np.where(same_b, fa, fb)
            halve = same_b & (side == 1)
            fa_new = np.where(halve, 0.5 * fa_new, fa_new)
            side = np.where(same_b, 1, -1)
            a, fa, b, fb = a_new, fa_new, c, fc
            if np.all((np.abs(b - a) <= rtol * np.maximum(np.abs(a), np.abs(b))) | (fc == 0)):
                break
    return b


def newton_vec(f, fprime, x0, lo, hi, n_iter: int = 100, decreasing: bool = True):
    """Safeguarded Newton for many monotone problems at once.

    ``f`` must be decreasing (or increasing when ``decreasing=False``) on each
    bracket. Iterates that leave the bracket fall back to the midpoint.
    """
    x = np.array(x0, dtype=float)
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x = np.clip(x, lo, hi)
    with np.errstate(all="ignore"):
        for _ in range(n_iter):
            fx = f(x)
            pos = fx > 0
            right = pos if decreasing else ~pos
            lo = np.where(right, x, lo)
            hi = np.where(right, hi, x)
            x_new = x - fx / fprime(x)
            bad = ~np.isfinite(x_new) | (x_new <= lo) | (x_new >= hi)
            x_new = np.where(bad, 0.5 * (lo + hi), x_new)
            if np.all(np.abs(x_new - x) <= 1e-15 * np.maximum(1.0, np.abs(x))):
                x = x_new
                break
            x = x_new
    return x
