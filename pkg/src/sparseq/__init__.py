"""Sparse normal-means estimation with a truncated Dirichlet-process mixture prior."""

from .baselines import ThresholdSpec, fdr_estimate, hard_threshold, soft_threshold, sure_estimate
from .estimator import Estimate, coordinate_posterior, estimate, posterior_mean
from .prior_map import MapPrior, build_map_prior
from .vbdp import Hyperparams, VBState, fit

__all__ = [
    "Estimate", "Hyperparams", "MapPrior", "ThresholdSpec", "VBState", "build_map_prior",
    "coordinate_posterior", "estimate", "fdr_estimate", "fit", "hard_threshold",
    "posterior_mean", "soft_threshold", "sure_estimate",
]
__version__ = "0.1.0"
