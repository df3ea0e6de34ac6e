"""Piecewise Pareto distributions with finite cores: evaluation, sampling and
maximum-likelihood fitting with automatic selection of ``x_min``."""
from .distributions import (Family, FamilyParams, cdf, icdf, log_likelihood, mean, normalization,
                            pdf, sample, second_moment, tail_mass)
from .errors import ParetoError
from .estimators import FitResult, SolverConfig, fit, fit_fixed_xmin
from .sample_stats import SortedSample, SplitStats, build_sample, read_observations, split_at

__all__ = [
    "Family",
    "FamilyParams",
    "FitResult",
    "ParetoError",
    "SolverConfig",
    "SortedSample",
    "SplitStats",
    "build_sample",
    "cdf",
    "fit",
    "fit_fixed_xmin",
    "icdf",
    "log_likelihood",
    "mean",
    "normalization",
    "pdf",
    "read_observations",
    "sample",
    "second_moment",
    "split_at",
    "tail_mass",
]
__version__ = "0.1.0"
