"""Functions of persistence and auxiliary penalties."""
from .base import DIAGONAL, LossValue, Matching
from .distances import bottleneck, label_contrast_loss, sliced_wasserstein, slice_costs, wasserstein
from .penalties import penalty_binary_image, penalty_mse, penalty_square, penalty_tv
from .topological import hole_penalty, total_persistence
from .vectorization import Vectorization, landscape, persistence_image

__all__ = [
    "DIAGONAL",
    "LossValue",
    "Matching",
    "Vectorization",
    "bottleneck",
    "hole_penalty",
    "label_contrast_loss",
    "landscape",
    "penalty_binary_image",
    "penalty_mse",
    "penalty_square",
    "penalty_tv",
    "persistence_image",
    "slice_costs",
    "sliced_wasserstein",
    "total_persistence",
    "wasserstein",
]
