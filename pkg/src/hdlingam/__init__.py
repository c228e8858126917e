"""High-dimensional LiNGAM: causal order, direct and total effects from
data with more variables than observations."""

__version__ = "0.1.0"

from .linalg import Dataset, RidgeConfig, center_rows, ridge_fit, ridge_residual
from .ordering import CausalOrder, estimate_order, find_exogenous, independence_score
from .effects import (DirectEffects, TotalEffects, estimate_direct, estimate_total,
                      total_from_direct)
from .pipeline import LingamResult, fit_lingam

__all__ = [
    "Dataset", "RidgeConfig", "center_rows", "ridge_fit", "ridge_residual",
    "CausalOrder", "estimate_order", "find_exogenous", "independence_score",
    "DirectEffects", "TotalEffects", "estimate_direct", "estimate_total",
    "total_from_direct", "LingamResult", "fit_lingam",
]
