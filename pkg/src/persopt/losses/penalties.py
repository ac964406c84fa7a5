"""Non-topological penalties on the optimised parameters.

Each returns a ``LossValue`` whose ``grad_aux`` has the shape of the input
flattened.  Kinks use the sign convention ``sign(0) = 0``.
"""
from __future__ import annotations

import math

import numpy as np

from .base import LossValue

__all__ = ["penalty_square", "penalty_binary_image", "penalty_tv", "penalty_mse"]


def penalty_square(x, box=((0.0, 0.0), (1.0, 1.0))) -> LossValue:
    """Sum of Euclidean distances from each point to an axis-aligned box."""
    x = np.asarray(x, dtype=np.float64)
    lo, hi = (np.asarray(v, dtype=np.float64) for v in box)
    if lo.shape != (x.shape[1],) or hi.shape != lo.shape or np.any(hi < lo):
        raise ValueError("box must be (lower corner, upper corner) matching the point dimension")
    out = x - np.clip(x, lo, hi)
    dist = np.sqrt((out ** 2).sum(axis=1))
    grad = np.zeros_like(x)
    outside = dist > 0
    grad[outside] = out[outside] / dist[outside, None]
    return LossValue(math.fsum(dist.tolist()), grad_aux=grad.ravel())


def penalty_binary_image(pixels) -> LossValue:
    """Sum over pixels of ``min(|p|, |1 - p|)``; ties at 0.5 take the ``|p|`` branch."""
    p = np.asarray(pixels, dtype=np.float64).ravel()
    near_zero = np.abs(p) <= np.abs(1 - p)
    value = np.where(near_zero, np.abs(p), np.abs(1 - p))
    grad = np.where(near_zero, np.sign(p), -np.sign(1 - p))
    return LossValue(math.fsum(value.tolist()), grad_aux=grad)


def penalty_tv(beta) -> LossValue:
    """Total variation ``sum |beta[i+1] - beta[i]|``."""
    beta = np.asarray(beta, dtype=np.float64).ravel()
    if beta.size < 2:
        raise ValueError("total variation needs at least two coefficients")
    s = np.sign(np.diff(beta))
    grad = np.zeros_like(beta)
    grad[1:] += s
    grad[:-1] -= s
    return LossValue(math.fsum(np.abs(np.diff(beta)).tolist()), grad_aux=grad)


def penalty_mse(X, y, beta) -> LossValue:
    """Squared residual sum ``||X beta - y||^2`` (not averaged)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    beta = np.asarray(beta, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape != (y.size, beta.size):
        raise ValueError(f"incompatible shapes X{X.shape}, y({y.size},), beta({beta.size},)")
    r = X @ beta - y
    return LossValue(float(r @ r), grad_aux=2.0 * X.T @ r)
