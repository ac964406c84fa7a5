"""Losses read directly off a diagram."""
from __future__ import annotations

import math

import numpy as np

from .base import LossValue, canonical_order, off_diagonal

__all__ = ["total_persistence", "hole_penalty"]


def total_persistence(d, dims=(0,), exclude_top: int = 0) -> LossValue:
    """Sum of ``death - birth`` over the regular points in ``dims``.

    Essential points are ignored and points on the diagonal carry no
    gradient.  ``exclude_top`` drops the most persistent points of each
    dimension (ties by position in birth/death order) before summing.
    """
    total = []
    grads = {}
    for dim in sorted(set(dims)):
        part = d[dim]
        g = np.zeros((len(part), 2))
        keep = off_diagonal(part)
        pts = part.points[keep]
        order = canonical_order(pts)
        keep, pts = keep[order], pts[order]
        if exclude_top:
            pers = pts[:, 1] - pts[:, 0]
            ranked = np.lexsort((np.arange(len(pers)), -pers))
            kept = np.sort(ranked[exclude_top:])
            keep, pts = keep[kept], pts[kept]
        total.extend((pts[:, 1] - pts[:, 0]).tolist())
        g[keep, 0] = -1.0
        g[keep, 1] = 1.0
        grads[dim] = g
    return LossValue(math.fsum(total), grad_regular=grads)


def hole_penalty(d, dim: int = 1) -> LossValue:
    """Negated sum of squared sup-norm distances to the diagonal.

    Each point ``(b, d)`` contributes ``-((d - b) / 2) ** 2``; minimising it
    grows the holes of the underlying space.
    """
    part = d[dim]
    half = (part.deaths - part.births) / 2.0
    order = canonical_order(part.points)
    value = -math.fsum((half[order] ** 2).tolist())
    g = np.stack([half, -half], axis=1).reshape(-1, 2)
    return LossValue(value, grad_regular={dim: g})
