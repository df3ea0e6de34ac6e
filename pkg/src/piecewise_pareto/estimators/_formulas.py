"""Closed forms and stationarity conditions, vectorised over split statistics.

Notation used throughout::

    a = n_L * <ln(x / x_min)>_L        (>= 0, tail log sum)
    b = n_S * <ln(x_min / x)>_S        (>= 0, pow core log sum)
    e = n_S * (<x>_S / x_min - 1)      (<= 0, exp core linear sum)
"""
from __future__ import annotations

import math

import numpy as np


def tail_sum(n_L, mean_ln_L, xm):
    return n_L * (mean_ln_L - np.log(xm))


def pow_core_sum(n_S, mean_ln_S, xm):
    return n_S * (np.log(xm) - mean_ln_S)


def exp_core_sum(n_S, mean_x_S, xm):
    return n_S * (mean_x_S / xm - 1)


# --- uniform / pow core ---------------------------------------------------

def uni_alpha_hat(n, a):
    return 0.5 + np.sqrt(0.25 + n / a)


def pow_alpha_hat(n, a, beta):
    """Root of dlnL/dalpha at fixed beta and x_min (the root above 1)."""
    return 0.5 * (1 - beta + (1 + beta) * np.sqrt(1 + 4 * n / ((beta + 1) * a)))


def pow_beta_hats(n, a, b):
    """Both joint roots (beta_plus, beta_minus) at fixed x_min."""
    with np.errstate(all="ignore"):
        s = np.sqrt(a * b)
        return -1 + n / (b + s), -1 + n / (b - s)


def pow_interior(n, n_L, n_S, mean_ln_L, mean_ln_S, beta=None):
    """Stationary point on an interval where the split is fixed.

    Returns ``(alpha, beta, ln_x_min)``. With ``beta`` given only the alpha and
    x_min conditions are solved.
    """
    with np.errstate(all="ignore"):
        if beta is None:
            beta = -1 + n / (n_S * (mean_ln_L - mean_ln_S))
        alpha = (n * (beta + 1) - beta * n_L) / n_L
        ln_xm = mean_ln_L - n_L / ((beta + 1) * n_S)
    return alpha, beta, ln_xm


def fpow_dlda(n, alpha, a, b):
    return (alpha ** 2 + 1) * n / (alpha ** 3 - alpha) - a - b


def fpow_d2(n, alpha):
    return -(alpha ** 4 + 4 * alpha ** 2 - 1) * n / (alpha ** 2 * (alpha ** 2 - 1) ** 2)


def fpow_interior(n, n_L, n_S, mean_ln_L, mean_ln_S):
    """``(alpha, ln_x_min)``; ``alpha <= 0`` or nan when ``n_L <= n_S``."""
    n_L, n_S = np.asarray(n_L, dtype=float), np.asarray(n_S, dtype=float)
    with np.errstate(all="ignore"):
        d = n_L - n_S
        alpha = n / d
        ln_xm = 1 - n ** 2 / (2 * n_L * n_S) + (n_L * mean_ln_L - n_S * mean_ln_S) / d
    return alpha, ln_xm


# --- exp core ----------------------------------------------------------------

_SMALL = 1e-4


def exp_r(beta):
    """``beta / (e^beta - 1)``, equal to 1 at beta = 0."""
    beta = np.asarray(beta, dtype=float)
    with np.errstate(all="ignore"):
        out = beta / np.expm1(beta)
    small = np.abs(beta) < _SMALL
    ser = 1 - beta / 2 + beta ** 2 / 12 - beta ** 4 / 720
    return np.where(small, ser, out)


def exp_alpha_hat(n, a, beta):
    """Root of dlnL/dalpha at fixed beta and x_min."""
    r = exp_r(beta)
    with np.errstate(all="ignore"):
        return 1 + 2 * n / (a * (1 + np.sqrt(1 + 4 * n / (r * a))))


def exp_R_parts(beta):
    """``(N, P, Q)`` with ``R(alpha, beta) = N / ((alpha - 1) P + Q)``.

    Depends on beta only, so grids over beta stay cheap when broadcast
    against many alphas.
    """
    beta = np.asarray(beta, dtype=float)
    with np.errstate(all="ignore"):
        bp = np.where(beta > 0, beta, 1.0)
        bn = np.where(beta < 0, beta, -1.0)
        pos = beta > 0
        N = np.where(pos, (bp + np.expm1(-bp)) / bp, (bn * np.exp(bn) - np.expm1(bn)) / bn)
        P = np.where(pos, -np.expm1(-bp), np.expm1(bn))
        Q = np.where(pos, bp * np.exp(-bp), bn)
        small = np.abs(beta) < _SMALL
        N = np.where(small, 0.5 + beta / 3 + beta ** 2 / 8 + beta ** 3 / 30, N)
        P = np.where(small, 1 + beta / 2 + beta ** 2 / 6 + beta ** 3 / 24, P)
        Q = np.where(small, 1.0, Q)
    return N, P, Q


def exp_R(alpha, beta):
    """``(e^b (b - 1) + 1) / (b * ((alpha - 1)(e^b - 1) + b))``, finite at b = 0."""
    N, P, Q = exp_R_parts(beta)
    with np.errstate(all="ignore"):
        return N / ((np.asarray(alpha, dtype=float) - 1) * P + Q)


def exp_dldb(n, alpha, beta, e):
    return -n * (alpha - 1) * exp_R(alpha, beta) - e


def exp_dlda(n, alpha, beta, a):
    r = exp_r(beta)
    return n / (alpha - 1) - n / (alpha - 1 + r) - a


def exp_ell(beta):
    """``ln((1 - r) / beta)`` with ``r = beta / (e^beta - 1)``."""
    beta = np.asarray(beta, dtype=float)
    with np.errstate(all="ignore"):
        direct = np.log((1 - exp_r(beta)) / beta)
        ser = np.log(0.5 - beta / 12 + beta ** 3 / 720)
    return np.where(np.abs(beta) < _SMALL, ser, direct)


def exp_interior_g(beta, c, ratio_LS):
    """Zero set equals that of the interior condition ``z(beta)``.

    ``c = <ln x>_L - ln <x>_S`` and ``ratio_LS = n_L / n_S``.
    """
    return exp_r(beta) * (c + exp_ell(beta)) - ratio_LS


def exp_interior_from_beta(beta, n_L, n_S, mean_x_S):
    """``(alpha, x_min)`` of the interior stationary point for a root ``beta``."""
    r = exp_r(beta)
    return 1 + n_S / n_L * r, mean_x_S * np.exp(-exp_ell(beta))


def fexp_dlda(n, alpha, a, e):
    with np.errstate(all="ignore"):
        return n / alpha + n / (alpha - 1) - n * alpha / ((alpha - 1) + np.exp(-alpha)) - a - e


def fexp_d2(n, alpha):
    with np.errstate(all="ignore"):
        q = np.exp(-alpha)
        return (-n / alpha ** 2 - n / (alpha - 1) ** 2
                - n * ((alpha + 1) * q - 1) / ((alpha - 1) + q) ** 2)


def fexp_alpha_interior(n, n_L, n_S, mean_x_S, xm):
    """alpha solving dlnL/dx_min = 0 at given x_min (split fixed)."""
    return n * xm / (n_L * xm + n_S * mean_x_S)


# --- alg core ----------------------------------------------------------------

def alg_alpha_hat(n, a, beta):
    lam = a / n
    with np.errstate(all="ignore"):
        return ((3 * beta + 1) + np.sqrt((1 + beta) * (4 + lam + beta * (8 + lam)) / lam)) / (4 * beta + 2)


def falg_dlda(n, alpha, a, core_dlda):
    """``core_dlda = sum_S ln(u) u^alpha / (2 - u^alpha)``."""
    return -a + 2 * n * alpha / (alpha ** 2 - 1) - 2 * n / alpha - core_dlda


def falg_d2(n, alpha, core_d2):
    """``core_d2 = sum_S 2 ln(u)^2 u^alpha / (2 - u^alpha)^2``."""
    return -2 * n * (alpha ** 2 + 1) / (alpha ** 2 - 1) ** 2 + 2 * n / alpha ** 2 - core_d2


LN2 = math.log(2.0)
