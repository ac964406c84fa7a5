"""Independent reference computations used by the tests.

None of these share code with the package: persistence is recovered from
ranks of boundary matrices of every sublevel complex, matchings are
enumerated exhaustively, and derivatives come from central differences.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np


# --- linear algebra over the two-element field -------------------------------

def gf2_rank(rows) -> int:
    """Rank of a set of GF(2) vectors given as Python ints."""
    basis = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


def gf2_nullspace(columns, n_rows) -> list[int]:
    """Basis of the kernel of the matrix whose columns are the given bitsets.

    Returned vectors are bitsets over column indices.
    """
    n = len(columns)
    # row-reduce the augmented [A^T | I] so that zero rows of A^T give kernel vectors
    rows = [(columns[j], 1 << j) for j in range(n)]
    pivots = {}
    kernel = []
    for a, tag in rows:
        while a:
            top = a.bit_length() - 1
            if top not in pivots:
                pivots[top] = (a, tag)
                break
            pa, pt = pivots[top]
            a ^= pa
            tag ^= pt
        if not a:
            kernel.append(tag)
    return kernel


def boundary_columns(cells, dim, index_of):
    """Boundary of each ``dim``-cell as a bitset over the ``dim - 1`` cells."""
    out = []
    for c in cells:
        col = 0
        for face in c["boundary"]:
            col ^= 1 << index_of[face]
        out.append(col)
    return out


def persistent_betti(cells_by_dim, values, k, a, b) -> int:
    """Rank of ``H_k(K_a) -> H_k(K_b)`` for sublevel thresholds ``a <= b``.

    ``cells_by_dim[d]`` lists dicts with ``id`` and ``boundary``.
    """
    def sub(dim, t):
        return [c for c in cells_by_dim.get(dim, []) if values[c["id"]] <= t]

    ks = cells_by_dim.get(k, [])
    idx_k = {c["id"]: i for i, c in enumerate(ks)}
    idx_km1 = {c["id"]: i for i, c in enumerate(cells_by_dim.get(k - 1, []))}
    cells_a = sub(k, a)
    if k == 0:
        z_cols = [1 << idx_k[c["id"]] for c in cells_a]
    else:
        bcols = boundary_columns(cells_a, k, idx_km1)
        kern = gf2_nullspace(bcols, len(idx_km1))
        z_cols = []
        for vec in kern:
            full = 0
            for j, c in enumerate(cells_a):
                if vec >> j & 1:
                    full ^= 1 << idx_k[c["id"]]
            z_cols.append(full)
    b_cols = boundary_columns(sub(k + 1, b), k + 1, idx_k)
    return gf2_rank(z_cols + b_cols) - gf2_rank(b_cols)


def oracle_diagram(complex_, values):
    """Multiset of off-diagonal points and essential births per dimension.

    Points are recovered by inclusion-exclusion of persistent Betti numbers
    over consecutive distinct filtration values.  Points on the diagonal are
    invisible to this method and are not returned.
    """
    cells_by_dim = {}
    for cell in complex_.cells:
        cells_by_dim.setdefault(cell.dim, []).append({"id": cell.id, "boundary": list(cell.boundary)})
    vals = sorted(set(np.asarray(values).tolist()))
    top = max(cells_by_dim)
    res = {}
    inf = math.inf
    for k in range(top + 1):
        def beta(i, j):
            # thresholds by index; index -1 is the empty complex, index len(vals) is +inf
            if i < 0:
                return 0
            a = vals[i]
            b = vals[j] if j < len(vals) else inf
            return persistent_betti(cells_by_dim, values, k, a, b)

        pts = Counter()
        m = len(vals)
        for i in range(m):
            for j in range(i + 1, m):
                mult = beta(i, j - 1) - beta(i - 1, j - 1) - beta(i, j) + beta(i - 1, j)
                if mult:
                    pts[(vals[i], vals[j])] += mult
            ess = beta(i, m) - beta(i - 1, m)
            if ess:
                pts[(vals[i], inf)] += ess
        res[k] = pts
    return res


def diagram_multiset(d, max_dim):
    """Same format as ``oracle_diagram`` from a package diagram (diagonal dropped)."""
    out = {}
    for k in range(max_dim + 1):
        part = d[k]
        pts = Counter((float(b), float(e)) for b, e in zip(part.births, part.deaths) if e > b)
        pts.update((float(b), math.inf) for b in part.essential)
        out[k] = pts
    return out


# --- matchings ---------------------------------------------------------------

def linf(p, q):
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def to_diag(p):
    return (p[1] - p[0]) / 2.0


def all_matching_costs(a, b):
    """Yield the list of matched costs for every partial matching of ``a`` and ``b``."""
    a = [tuple(p) for p in a]
    b = [tuple(p) for p in b]
    n, m = len(a), len(b)
    for k in range(min(n, m) + 1):
        for sa in itertools.combinations(range(n), k):
            for sb in itertools.permutations(range(m), k):
                costs = [linf(a[i], b[j]) for i, j in zip(sa, sb)]
                costs += [to_diag(a[i]) for i in range(n) if i not in sa]
                costs += [to_diag(b[j]) for j in range(m) if j not in sb]
                yield costs


def brute_bottleneck(a, b) -> float:
    return min((max(c, default=0.0) for c in all_matching_costs(a, b)), default=0.0)


def brute_wasserstein(a, b, p) -> float:
    best = min((math.fsum(x ** p for x in c) for c in all_matching_costs(a, b)), default=0.0)
    return best ** (1.0 / p)


# --- derivatives -------------------------------------------------------------

def central_diff(fun, x, eps=1e-6):
    x = np.array(x, dtype=np.float64)
    g = np.zeros_like(x)
    flat = x.ravel()
    gflat = g.ravel()
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + eps
        up = fun(x)
        flat[i] = old - eps
        down = fun(x)
        flat[i] = old
        gflat[i] = (up - down) / (2 * eps)
    return g


def grad_close(analytic, numeric, rel=1e-5, floor=1e-6, atol=0.0) -> bool:
    """Relative agreement with an absolute floor for near-zero entries.

    ``atol`` absorbs the round-off of the difference quotient itself (see
    ``fd_roundoff``), which no relative test can resolve at a zero gradient.
    """
    analytic = np.asarray(analytic, dtype=np.float64).ravel()
    numeric = np.asarray(numeric, dtype=np.float64).ravel()
    scale = max(np.abs(analytic).max(initial=0.0), np.abs(numeric).max(initial=0.0), floor)
    return bool(np.abs(analytic - numeric).max(initial=0.0) <= rel * scale + atol)


def fd_roundoff(value, eps=1e-6, safety=16.0) -> float:
    """Bound on the rounding error of a central difference of a function near ``value``."""
    return safety * np.finfo(np.float64).eps * max(abs(value), 1.0) / eps


def sublevel_values_distinct(values, tol=1e-4) -> bool:
    """True if distinct filtration values are separated by more than ``tol``."""
    v = np.unique(np.asarray(values))
    return bool(len(v) < 2 or np.diff(v).min() > tol)
