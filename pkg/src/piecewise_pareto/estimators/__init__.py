"""Maximum-likelihood estimators and the solver utilities they use."""
from ..solvers import SolverConfig, bisect, nelder_mead_1d, newton
from .api import FitResult, fit, fit_alpha, fit_beta, fit_fixed_xmin, interior_candidate

__all__ = [
    "FitResult",
    "SolverConfig",
    "bisect",
    "newton",
    "nelder_mead_1d",
    "fit",
    "fit_alpha",
    "fit_beta",
    "fit_fixed_xmin",
    "interior_candidate",
]
