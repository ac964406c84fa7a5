"""Parametrized filtration families with their gradient tapes.

Every function returns the filtration values together with a ``GradTape``
whose rows are the cells and whose columns are the parameters.  All max-type
constructions select the first maximiser in lexicographic order of the
generating indices, so the tape is a deterministic selection from the
subdifferential.
"""
from __future__ import annotations

import itertools

import numpy as np

from .complex import Complex, Filtration, GradTape

__all__ = [
    "rips_filtration",
    "rips_from_matrix",
    "weighted_rips_filtration",
    "dtm_weights",
    "dtm_filtration",
    "lower_star_filtration",
    "height_filtration",
    "background_value",
]


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"point cloud must be an (n, d) array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point cloud contains non-finite entries")
    return x


def _check_vertices(k: Complex, n: int):
    if k.n_vertices != n:
        raise ValueError(f"complex has {k.n_vertices} vertices but {n} inputs were given")


def _distance_matrix(x: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def _max_pair(k: Complex, dim: int, edge_value):
    """Per ``dim``-cell, the maximal vertex pair under ``edge_value(a, b)``.

    Returns ``(values, first, second)`` where ``first < second`` are the
    vertices of the selected pair; ties keep the lexicographically first pair.
    """
    verts = k.vertex_array(dim)
    pairs = list(itertools.combinations(range(dim + 1), 2))
    a = np.stack([verts[:, i] for i, _ in pairs], axis=1)
    b = np.stack([verts[:, j] for _, j in pairs], axis=1)
    vals = edge_value(a, b)
    pick = np.argmax(vals, axis=1)
    rows = np.arange(len(verts))
    return vals[rows, pick], a[rows, pick], b[rows, pick]


def rips_filtration(x, k: Complex):
    """Vietoris-Rips filtration of a point cloud over ``k``.

    Parameters are the flattened coordinates ``x.ravel()``.  Each simplex
    takes the largest pairwise distance of its vertices and routes to the
    coordinates of that pair.  A zero-length selected pair gets an empty
    (zero) gradient.
    """
    x = _as_points(x)
    n, d = x.shape
    _check_vertices(k, n)
    dist = _distance_matrix(x)
    values = np.zeros(len(k))
    rows, cols, coefs = [], [], []
    for dim in range(1, k.max_dim + 1):
        ids = np.arange(k.dim_range(dim).start, k.dim_range(dim).stop)
        vals, i, j = _max_pair(k, dim, lambda a, b: dist[a, b])
        values[ids] = vals
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = (x[i] - x[j]) / vals[:, None]
        unit[vals == 0] = 0.0
        axes = np.arange(d)
        rows.append(np.repeat(ids, 2 * d))
        cols.append(np.concatenate([i[:, None] * d + axes, j[:, None] * d + axes], axis=1).ravel())
        coefs.append(np.concatenate([unit, -unit], axis=1).ravel())
    tape = _tape(len(k), n * d, rows, cols, coefs)
    return Filtration(values), tape


def rips_from_matrix(m, k: Complex):
    """Rips-type filtration read from a dissimilarity matrix.

    Parameters are the flattened matrix entries ``m.ravel()``; each simplex
    routes with coefficient 1 to the upper-triangular entry ``(i, j)``,
    ``i < j``, of its selected pair.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    if not np.array_equal(m, m.T):
        raise ValueError("matrix must be symmetric")
    if np.any(np.diag(m) != 0):
        raise ValueError("matrix diagonal must be zero")
    if np.any(m < 0):
        raise ValueError("matrix entries must be non-negative")
    n = m.shape[0]
    _check_vertices(k, n)
    values = np.zeros(len(k))
    rows, cols, coefs = [], [], []
    for dim in range(1, k.max_dim + 1):
        ids = np.arange(k.dim_range(dim).start, k.dim_range(dim).stop)
        vals, i, j = _max_pair(k, dim, lambda a, b: m[a, b])
        values[ids] = vals
        rows.append(ids)
        cols.append(i * n + j)
        coefs.append(np.ones(len(ids)))
    return Filtration(values), _tape(len(k), n * n, rows, cols, coefs)


def weighted_rips_filtration(x, weights, k: Complex):
    """Weighted Rips filtration.

    Vertex ``j`` gets ``2 f_j``; edge ``{i, j}`` gets
    ``max(2 f_i, 2 f_j, |x_i - x_j| + f_i + f_j)``; larger simplices take the
    maximum over their edges.  Parameters are ``x.ravel()`` followed by the
    ``n`` weights.  Ties select the first branch in the order written.
    """
    x = _as_points(x)
    n, d = x.shape
    f = np.asarray(weights, dtype=np.float64).ravel()
    if f.shape != (n,):
        raise ValueError(f"expected {n} weights, got {f.size}")
    if not np.all(np.isfinite(f)):
        raise ValueError("weights contain non-finite entries")
    _check_vertices(k, n)
    dist = _distance_matrix(x)
    wbase = n * d
    values = np.zeros(len(k))
    values[: k.n_vertices] = 2.0 * f
    rows = [np.arange(n)]
    cols = [wbase + np.arange(n)]
    coefs = [np.full(n, 2.0)]
    if k.max_dim < 1:
        return Filtration(values), _tape(len(k), wbase + n, rows, cols, coefs)

    def edge_value(a, b):
        branches = np.stack([2 * f[a], 2 * f[b], dist[a, b] + f[a] + f[b]])
        return branches.max(axis=0)

    axes = np.arange(d)
    for dim in range(1, k.max_dim + 1):
        ids = np.arange(k.dim_range(dim).start, k.dim_range(dim).stop)
        vals, i, j = _max_pair(k, dim, edge_value)
        values[ids] = vals
        branch = np.argmax(np.stack([2 * f[i], 2 * f[j], dist[i, j] + f[i] + f[j]], axis=1), axis=1)
        for b, sel in ((0, branch == 0), (1, branch == 1)):
            owner = i if b == 0 else j
            rows.append(ids[sel])
            cols.append(wbase + owner[sel])
            coefs.append(np.full(int(sel.sum()), 2.0))
        sel = branch == 2
        ii, jj, dd = i[sel], j[sel], dist[i[sel], j[sel]]
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = (x[ii] - x[jj]) / dd[:, None]
        unit[dd == 0] = 0.0
        sid = ids[sel]
        rows.append(np.repeat(sid, 2 * d + 2))
        cols.append(np.concatenate([ii[:, None] * d + axes, jj[:, None] * d + axes,
                                    wbase + ii[:, None], wbase + jj[:, None]], axis=1).ravel())
        coefs.append(np.concatenate([unit, -unit, np.ones((len(sid), 2))], axis=1).ravel())
    return Filtration(values), _tape(len(k), wbase + n, rows, cols, coefs)


def dtm_weights(x, k_nn: int):
    """Distance-to-measure weights: mean distance to the ``k_nn`` nearest other points.

    Returns the weights and a tape of shape ``(n, n * d)`` over ``x.ravel()``.
    Neighbour ties keep the smaller index.
    """
    x = _as_points(x)
    n, d = x.shape
    if not 1 <= k_nn < n:
        raise ValueError(f"k_nn must satisfy 1 <= k_nn < n={n}, got {k_nn}")
    dist = _distance_matrix(x)
    # self goes last so that it is never selected
    keyed = dist.copy()
    np.fill_diagonal(keyed, np.inf)
    nbrs = np.argsort(keyed, axis=1, kind="stable")[:, :k_nn]
    owner = np.repeat(np.arange(n), k_nn)
    other = nbrs.ravel()
    dd = dist[owner, other]
    weights = dd.reshape(n, k_nn).mean(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = (x[owner] - x[other]) / dd[:, None] / k_nn
    unit[dd == 0] = 0.0
    axes = np.arange(d)
    rows = np.repeat(owner, 2 * d)
    cols = np.concatenate([owner[:, None] * d + axes, other[:, None] * d + axes], axis=1).ravel()
    coefs = np.concatenate([unit, -unit], axis=1).ravel()
    return weights, GradTape.from_entries(n, n * d, rows, cols, coefs)


def dtm_filtration(x, k_nn: int, k: Complex):
    """Weighted Rips with DTM weights, differentiated through the weights.

    The returned tape is over ``x.ravel()`` only.
    """
    x = _as_points(x)
    weights, wtape = dtm_weights(x, k_nn)
    filt, tape = weighted_rips_filtration(x, weights, k)
    n_coords = x.size
    # parameters of the weighted tape are (coords, weights); weights depend on coords
    inner = GradTape(
        np.vstack([np.eye(n_coords), wtape.dense()])
    )
    return filt, tape.compose(inner)


def lower_star_filtration(f, k: Complex):
    """Lower-star filtration: each cell takes the max of its vertex values.

    Routes each cell to its maximising vertex (smallest vertex id on ties)
    with coefficient 1; parameters are the vertex values.
    """
    f = np.asarray(f, dtype=np.float64).ravel()
    if f.shape != (k.n_vertices,):
        raise ValueError(f"expected {k.n_vertices} vertex values, got {f.size}")
    if not np.all(np.isfinite(f)):
        raise ValueError("vertex values contain non-finite entries")
    values = np.empty(len(k))
    owner = np.empty(len(k), dtype=np.int64)
    for dim in range(k.max_dim + 1):
        verts = k.vertex_array(dim)
        r = k.dim_range(dim)
        pick = np.argmax(f[verts], axis=1)
        sel = verts[np.arange(len(verts)), pick]
        values[r.start:r.stop] = f[sel]
        owner[r.start:r.stop] = sel
    tape = GradTape.from_entries(len(k), k.n_vertices, np.arange(len(k)), owner, np.ones(len(k)))
    return Filtration(values), tape


def background_value(shape) -> float:
    """Value assigned to background pixels by ``height_filtration``."""
    h, w = shape
    return 2.0 * (h + w)


def height_filtration(image, theta: float):
    """Directional height of the foreground pixels of a binary image.

    Foreground pixel ``(r, c)`` gets ``cos(theta) * c + sin(theta) * r``;
    background pixels get ``background_value(image.shape)`` and no gradient.
    Returns the per-pixel values (row-major) and a tape with one parameter,
    ``theta``.
    """
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("image must be two-dimensional")
    if not np.all((image == 0) | (image == 1)):
        raise ValueError("image must be binary (0/1)")
    theta = float(theta)
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    h, w = image.shape
    r, c = np.divmod(np.arange(h * w), w)
    fg = image.ravel() == 1
    f = np.full(h * w, background_value((h, w)))
    f[fg] = np.cos(theta) * c[fg] + np.sin(theta) * r[fg]
    slope = -np.sin(theta) * c[fg] + np.cos(theta) * r[fg]
    tape = GradTape.from_entries(h * w, 1, np.flatnonzero(fg), np.zeros(int(fg.sum())), slope)
    return f, tape


def _tape(n_rows, n_params, rows, cols, coefs):
    if rows:
        rows, cols, coefs = (np.concatenate(a) for a in (rows, cols, coefs))
    return GradTape.from_entries(n_rows, n_params, rows, cols, coefs)
