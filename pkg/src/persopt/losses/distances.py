"""Matching distances between diagrams and the label-contrast loss built on them.

Only off-diagonal regular points take part; a point may always be matched to
its own projection on the diagonal.  Gradients are taken with the optimal
matching (or sort order) held fixed.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .base import DIAGONAL, LossValue, Matching, canonical_order, off_diagonal

__all__ = [
    "bottleneck",
    "wasserstein",
    "sliced_wasserstein",
    "label_contrast_loss",
    "diagram_points",
    "slice_costs",
]

_SQRT2 = math.sqrt(2.0)


def _ground(a, b, internal_p):
    diff = a[:, None, :] - b[None, :, :]
    if internal_p == math.inf:
        return np.abs(diff).max(axis=2)
    if internal_p == 2:
        return np.sqrt((diff ** 2).sum(axis=2))
    raise ValueError(f"ground metric must be inf or 2, got {internal_p}")


def _to_diag(pts, internal_p):
    pers = pts[:, 1] - pts[:, 0]
    return pers / 2.0 if internal_p == math.inf else pers / _SQRT2


def _augmented(a, b, internal_p):
    """(n+m) square cost matrix; rows: a then diagonal slots, cols: b then diagonal slots."""
    n, m = len(a), len(b)
    c = np.full((n + m, n + m), np.inf)
    if n and m:
        c[:n, :m] = _ground(a, b, internal_p)
    c[np.arange(n), m + np.arange(n)] = _to_diag(a, internal_p)
    c[n + np.arange(m), np.arange(m)] = _to_diag(b, internal_p)
    c[n:, m:] = 0.0
    return c


def _cost_grad(a_pt, b_pt, internal_p):
    """Gradient of the ground cost with respect to ``a_pt`` (``b_pt=None`` is the diagonal)."""
    if b_pt is None:
        if internal_p == math.inf:
            return np.array([-0.5, 0.5])
        return np.array([-1.0, 1.0]) / _SQRT2
    diff = a_pt - b_pt
    if internal_p == math.inf:
        g = np.zeros(2)
        k = int(np.argmax(np.abs(diff)))
        g[k] = np.sign(diff[k])
        return g
    norm = math.sqrt(float(diff @ diff))
    return diff / norm if norm > 0 else np.zeros(2)


def _prepare(d, target, dim, internal_p):
    if internal_p not in (2, math.inf):
        raise ValueError(f"ground metric must be inf or 2, got {internal_p}")
    part, tpart = d[dim], target[dim]
    ia, ib = off_diagonal(part), off_diagonal(tpart)
    a, b = part.points[ia], tpart.points[ib]
    oa, ob = canonical_order(a), canonical_order(b)
    return part, ia[oa], a[oa], ib[ob], b[ob]


def _decode(rows, cols, n, m):
    """Matched (i, j) in local indices with DIAGONAL for slots, diag-diag dropped."""
    out = []
    for r, c in zip(rows, cols):
        i = r if r < n else DIAGONAL
        j = c if c < m else DIAGONAL
        if i == DIAGONAL and j == DIAGONAL:
            continue
        out.append((int(i), int(j)))
    return out


def _pair_cost(a, b, i, j, internal_p):
    if i == DIAGONAL:
        return float(_to_diag(b[j:j + 1], internal_p)[0])
    if j == DIAGONAL:
        return float(_to_diag(a[i:i + 1], internal_p)[0])
    return float(_ground(a[i:i + 1], b[j:j + 1], internal_p)[0, 0])


def _global_pairs(local, ia, ib):
    return tuple((int(ia[i]) if i != DIAGONAL else DIAGONAL,
                  int(ib[j]) if j != DIAGONAL else DIAGONAL) for i, j in local)


def bottleneck(d, target, dim: int, internal_p=math.inf):
    """Bottleneck distance between the regular parts in one dimension.

    Binary search over the distinct entries of the augmented cost matrix with
    a perfect-matching feasibility test.  The subgradient is that of the
    matched pair realising the maximum (first such pair on ties).
    """
    part, ia, a, ib, b = _prepare(d, target, dim, internal_p)
    n, m = len(a), len(b)
    grad = np.zeros((len(part), 2))
    if n + m == 0:
        return LossValue(0.0, grad_regular={dim: grad}), Matching(())
    cost = _augmented(a, b, internal_p)
    finite = np.isfinite(cost)
    candidates = np.unique(cost[finite])
    lo, hi = 0, len(candidates) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        adj = csr_matrix((finite & (cost <= candidates[mid])).astype(np.int8))
        match = maximum_bipartite_matching(adj, perm_type="column")
        if np.all(match >= 0):
            best = (mid, match)
            hi = mid - 1
        else:
            lo = mid + 1
    mid, match = best
    value = float(candidates[mid])
    local = _decode(np.arange(n + m), match, n, m)
    costs = [_pair_cost(a, b, i, j, internal_p) for i, j in local]
    # a critical pair whose cost only involves the target carries no gradient
    critical = sorted(pr for pr, c in zip(local, costs) if c == value and pr[0] != DIAGONAL)
    if value > 0 and critical:
        i, j = critical[0]
        grad[ia[i]] = _cost_grad(a[i], None if j == DIAGONAL else b[j], internal_p)
    return LossValue(value, grad_regular={dim: grad}), Matching(_global_pairs(local, ia, ib), tuple(costs))


def wasserstein(d, target, dim: int, p: int = 2, internal_p=math.inf, power: bool = False):
    """p-Wasserstein distance between the regular parts in one dimension.

    Exact optimal matching by linear assignment on the augmented matrix.
    With ``power=True`` the value is the sum of matched costs to the ``p``
    (the distance raised to ``p``).
    """
    if not p or p <= 0:
        raise ValueError(f"p must be a positive integer, got {p}")
    part, ia, a, ib, b = _prepare(d, target, dim, internal_p)
    n, m = len(a), len(b)
    grad = np.zeros((len(part), 2))
    if n + m == 0:
        return LossValue(0.0, grad_regular={dim: grad}), Matching(())
    cost = _augmented(a, b, internal_p)
    rows, cols = linear_sum_assignment(cost ** p)
    local = _decode(rows, cols, n, m)
    costs = [_pair_cost(a, b, i, j, internal_p) for i, j in local]
    total = math.fsum(c ** p for c in costs)
    value = total if power else total ** (1.0 / p)
    if total > 0:
        outer = 1.0 if power else total ** (1.0 / p - 1.0) / p
        for (i, j), c in zip(local, costs):
            if i == DIAGONAL or c == 0:
                continue
            g = _cost_grad(a[i], None if j == DIAGONAL else b[j], internal_p)
            grad[ia[i]] += outer * p * c ** (p - 1) * g
    return LossValue(value, grad_regular={dim: grad}), Matching(_global_pairs(local, ia, ib), tuple(costs))


def diagram_points(part, essential_cap=None):
    """Points used by distance-type losses plus a map back to the diagram.

    Returns ``(points, reg_idx, n_ess)``: off-diagonal regular points (stored
    order) followed, if ``essential_cap`` is given, by essential points with
    death set to the cap.
    """
    reg_idx = off_diagonal(part)
    pts = part.points[reg_idx]
    n_ess = 0
    if essential_cap is not None and len(part.essential):
        ess = np.stack([part.essential, np.full(len(part.essential), float(essential_cap))], axis=1)
        pts = np.concatenate([pts, ess])
        n_ess = len(ess)
    return pts, reg_idx, n_ess


def _directions(n_dirs):
    thetas = -np.pi / 2 + np.pi * np.arange(n_dirs) / n_dirs
    return np.stack([np.cos(thetas), np.sin(thetas)], axis=1)


def _sw_points(a, b, n_dirs):
    """Sliced Wasserstein between point sets, gradients for both sides."""
    a = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 2)
    n, m = len(a), len(b)
    if n + m == 0:
        return 0.0, np.zeros((0, 2)), np.zeros((0, 2)), np.zeros(n_dirs)
    # canonical order makes the result independent of input point order
    oa, ob = canonical_order(a), canonical_order(b)
    a_s, b_s = a[oa], b[ob]
    mid_a = (a_s[:, 0] + a_s[:, 1]) / 2
    mid_b = (b_s[:, 0] + b_s[:, 1]) / 2
    x = np.concatenate([a_s, np.stack([mid_b, mid_b], axis=1)])
    y = np.concatenate([b_s, np.stack([mid_a, mid_a], axis=1)])
    u = _directions(n_dirs)
    px, py = x @ u.T, y @ u.T
    sx = np.argsort(px, axis=0, kind="stable")
    sy = np.argsort(py, axis=0, kind="stable")
    cols = np.arange(n_dirs)
    diff = px[sx, cols] - py[sy, cols]
    per_dir = np.abs(diff).sum(axis=0)
    value = float(per_dir.mean())
    s = np.sign(diff) / n_dirs
    gx = np.zeros((n + m, n_dirs))
    gy = np.zeros((n + m, n_dirs))
    gx[sx, cols] = s
    gy[sy, cols] = -s
    gx2 = gx @ u  # gradient w.r.t. the 2D points of x
    gy2 = gy @ u
    ga = gx2[:n].copy()
    gb = gy2[:m].copy()
    # diagonal copies: mid = (b + d) / 2 in both coordinates
    ga += (gy2[m:].sum(axis=1) / 2)[:, None]
    gb += (gx2[n:].sum(axis=1) / 2)[:, None]
    ga_out = np.empty_like(ga)
    gb_out = np.empty_like(gb)
    ga_out[oa] = ga
    gb_out[ob] = gb
    return value, ga_out, gb_out, per_dir / n_dirs


def slice_costs(d, target, dim: int, n_dirs: int = 50):
    """Per-direction contributions to the sliced distance (they sum to it)."""
    a, _, _ = diagram_points(d[dim])
    b, _, _ = diagram_points(target[dim])
    return _sw_points(a, b, n_dirs)[3]


def _scatter(part, reg_idx, n_ess, g):
    greg = np.zeros((len(part), 2))
    greg[reg_idx] = g[: len(reg_idx)]
    gess = np.zeros(len(part.essential))
    if n_ess:
        gess[:] = g[len(reg_idx):, 0]
    return greg, gess


def sliced_wasserstein(d, target, dim: int, n_dirs: int = 50, essential_cap=None) -> LossValue:
    """Sliced Wasserstein distance with evenly spaced directions on [-pi/2, pi/2).

    Each diagram is augmented with the diagonal projections of the other's
    points; the value is the mean over directions of the 1D transport cost
    between sorted projections.
    """
    if n_dirs < 1:
        raise ValueError("n_dirs must be >= 1")
    part, tpart = d[dim], target[dim]
    a, ia, na = diagram_points(part, essential_cap)
    b, _, _ = diagram_points(tpart, essential_cap)
    value, ga, _, _ = _sw_points(a, b, n_dirs)
    greg, gess = _scatter(part, ia, na, ga)
    return LossValue(value, grad_regular={dim: greg}, grad_essential={dim: gess})


def label_contrast_loss(diagrams, labels, n_dirs: int = 50, dim: int = 0, essential_cap=None) -> LossValue:
    """Ratio of within-class to class-incident sliced distances, summed over classes.

    For class ``l``: numerator sums SW(D_i, D_j) over ordered pairs ``i != j``
    with both labels ``l``; denominator over ordered pairs with ``y_i = l``
    and any ``j != i``.  Classes with a zero denominator are skipped with a
    warning.  ``per_diagram`` holds each input diagram's gradient.
    """
    labels = list(labels)
    if len(labels) != len(diagrams):
        raise ValueError("one label per diagram required")
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError("at least two labels must be present in the batch")
    y = np.array([classes.index(l) for l in labels])
    nd = len(diagrams)
    pts = [diagram_points(D[dim], essential_cap) for D in diagrams]
    dist = np.zeros((nd, nd))
    grads = {}
    for i in range(nd):
        for j in range(i + 1, nd):
            v, gi, gj, _ = _sw_points(pts[i][0], pts[j][0], n_dirs)
            dist[i, j] = dist[j, i] = v
            grads[i, j] = (gi, gj)

    value_terms = []
    coef = np.zeros((nd, nd))
    for cl in range(len(classes)):
        inside = y == cl
        num = math.fsum(dist[np.ix_(inside, inside)].ravel().tolist())
        den = math.fsum(dist[inside].ravel().tolist())
        if den == 0:
            warnings.warn(f"label {classes[cl]!r}: zero denominator, class term skipped", RuntimeWarning)
            continue
        value_terms.append(num / den)
        both = np.outer(inside, inside).astype(float)
        touch = inside[:, None].astype(float) + inside[None, :].astype(float)
        coef += (2 * both * den - touch * num) / den ** 2

    per = []
    accum = [np.zeros_like(p[0]) for p in pts]
    for (i, j), (gi, gj) in grads.items():
        if coef[i, j]:
            accum[i] += coef[i, j] * gi
            accum[j] += coef[i, j] * gj
    for D, (p, ridx, ness), g in zip(diagrams, pts, accum):
        part = D[dim]
        greg, gess = _scatter(part, ridx, ness, g)
        per.append(LossValue(0.0, grad_regular={dim: greg}, grad_essential={dim: gess}))
    return LossValue(math.fsum(value_terms), per_diagram=per)
