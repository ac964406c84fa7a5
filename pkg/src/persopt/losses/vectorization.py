"""Persistence landscapes and persistence images with their Jacobians."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import diagram_points

__all__ = ["Vectorization", "landscape", "persistence_image"]


@dataclass
class Vectorization:
    """Feature vector and Jacobians.

    ``jac_regular`` has shape ``(n_features, n_regular, 2)`` against the
    diagram's regular points; ``jac_essential`` has shape
    ``(n_features, n_essential)`` against essential births (non-zero only when
    essential points were capped into the computation).
    """

    values: np.ndarray
    jac_regular: np.ndarray
    jac_essential: np.ndarray

    def pull(self, weights) -> tuple[np.ndarray, np.ndarray]:
        """Diagram gradients of ``weights @ values``."""
        w = np.asarray(weights, dtype=np.float64)
        return np.tensordot(w, self.jac_regular, axes=1), w @ self.jac_essential


def _tents(pts, t):
    """Tent values and their (d/db, d/dd) slopes, shape (len(t), n)."""
    b, d = pts[:, 0][None, :], pts[:, 1][None, :]
    t = np.asarray(t, dtype=np.float64)[:, None]
    mid = (b + d) / 2
    rising = (t >= b) & (t <= mid)
    falling = (t > mid) & (t <= d)
    vals = np.where(rising, t - b, np.where(falling, d - t, 0.0))
    db = np.where(rising, -1.0, 0.0)
    dd = np.where(falling, 1.0, 0.0)
    return vals, db, dd


def landscape(d, dim: int, k_max: int, grid, essential_cap=None) -> Vectorization:
    """Values ``lambda(k, t)`` for ``k = 1..k_max`` (outer) and ``t`` in ``grid`` (inner).

    ``lambda(k, t)`` is the k-th largest tent value at ``t`` (0 if fewer than
    ``k`` points); equal values are ranked by point position in the diagram.
    """
    grid = np.asarray(grid, dtype=np.float64).ravel()
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    part = d[dim]
    # points on the diagonal have identically zero tents and are left out
    pts, reg_idx, n_ess = diagram_points(part, essential_cap)
    owners = np.concatenate([reg_idx, -1 - np.arange(n_ess)]).astype(np.int64)
    nt, npnt = len(grid), len(pts)
    values = np.zeros((k_max, nt))
    jreg = np.zeros((k_max, nt, len(part), 2))
    jess = np.zeros((k_max, nt, len(part.essential)))
    if npnt:
        # rank by value, ties by stored position of the point
        position = np.where(owners >= 0, owners, len(part) + (-1 - owners))
        vals, db, dd = _tents(pts, grid)
        order = np.lexsort((np.broadcast_to(position, vals.shape), -vals), axis=1)
        rows = np.arange(nt)
        for k in range(min(k_max, npnt)):
            sel = order[:, k]
            values[k] = vals[rows, sel]
            own = owners[sel]
            reg = own >= 0
            jreg[k, rows[reg], own[reg], 0] = db[rows[reg], sel[reg]]
            jreg[k, rows[reg], own[reg], 1] = dd[rows[reg], sel[reg]]
            ess = ~reg
            jess[k, rows[ess], -1 - own[ess]] = db[rows[ess], sel[ess]]
    return Vectorization(values.ravel(), jreg.reshape(k_max * nt, len(part), 2),
                         jess.reshape(k_max * nt, len(part.essential)))


def persistence_image(d, dim: int, grid, sigma: float, weight: str = "constant") -> Vectorization:
    """Gaussian-smoothed weighted sum over regular points, sampled at ``grid``.

    ``grid`` is an ``(m, 2)`` array of query points in the (birth, death)
    plane.  ``weight`` is ``"constant"`` (1) or ``"persistence"``
    (death - birth).
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if weight not in ("constant", "persistence"):
        raise ValueError(f"unknown weight {weight!r}")
    q = np.asarray(grid, dtype=np.float64).reshape(-1, 2)
    part = d[dim]
    pts = part.points
    diff = q[:, None, :] - pts[None, :, :]
    gauss = np.exp(-(diff ** 2).sum(axis=2) / (2 * sigma ** 2))
    if weight == "constant":
        w = np.ones(len(pts))
        dw = np.zeros((len(pts), 2))
    else:
        w = pts[:, 1] - pts[:, 0]
        dw = np.tile([-1.0, 1.0], (len(pts), 1))
    values = gauss @ w
    jac = gauss[:, :, None] * (dw[None, :, :] + w[None, :, None] * diff / sigma ** 2)
    return Vectorization(values, jac, np.zeros((len(q), len(part.essential))))
