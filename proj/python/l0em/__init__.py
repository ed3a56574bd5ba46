"""L0 / Lp penalized regression by EM fixed-point iteration."""

from ._l0em import (
    FitResult,
    NumericError,
    cv_select,
    fit,
    gen_ar1,
    gen_band_network,
    gen_response,
    lambda_ic,
    lambda_max,
    network,
    objective,
    weighted_ridge_solve,
)

__all__ = [
    "FitResult",
    "NumericError",
    "cv_select",
    "fit",
    "gen_ar1",
    "gen_band_network",
    "gen_response",
    "lambda_ic",
    "lambda_max",
    "network",
    "objective",
    "weighted_ridge_solve",
]
__version__ = "1.0.0"
