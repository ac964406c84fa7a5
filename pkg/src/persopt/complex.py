"""Finite cell complexes, filtration vectors and gradient tapes.

Cells are numbered by dimension first and lexicographically on their vertex
lists within a dimension, so every dimension occupies a contiguous id block.
The per-dimension vertex and boundary arrays are what the numeric code uses;
``Cell`` objects are materialised lazily for inspection.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sps

__all__ = [
    "Cell",
    "Complex",
    "Filtration",
    "GradTape",
    "build_full_simplex",
    "build_cubical_grid",
    "build_path",
    "validate_filtration",
]

SIMPLICIAL = "simplicial"
CUBICAL = "cubical"


@dataclass(frozen=True)
class Cell:
    id: int
    dim: int
    vertices: tuple[int, ...]
    boundary: tuple[int, ...]


class Complex:
    """A face-closed complex stored as per-dimension integer arrays.

    Parameters
    ----------
    kind : {"simplicial", "cubical"}
    vertex_blocks : list of int arrays
        ``vertex_blocks[d]`` has shape ``(n_d, k_d)`` and lists the sorted
        vertex ids of every ``d``-cell, rows in id order.
    boundary_blocks : list of int arrays
        ``boundary_blocks[d]`` has shape ``(n_d, b_d)`` with global cell ids of
        the codimension-1 faces (empty for ``d == 0``).
    shape : (h, w), optional
        Pixel grid shape for cubical complexes.
    """

    def __init__(self, kind, vertex_blocks, boundary_blocks, shape=None):
        if kind not in (SIMPLICIAL, CUBICAL):
            raise ValueError(f"unknown complex kind {kind!r}")
        self.kind = kind
        self.shape = shape
        self._vertices = [np.asarray(v, dtype=np.int64) for v in vertex_blocks]
        self._boundary = [np.asarray(b, dtype=np.int64) for b in boundary_blocks]
        sizes = [len(v) for v in self._vertices]
        self._offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        for arr in (*self._vertices, *self._boundary):
            arr.setflags(write=False)

    def __len__(self):
        return int(self._offsets[-1])

    def __repr__(self):
        counts = ", ".join(str(len(v)) for v in self._vertices)
        return f"Complex(kind={self.kind!r}, cells per dim=[{counts}])"

    @property
    def max_dim(self) -> int:
        return len(self._vertices) - 1

    @property
    def n_vertices(self) -> int:
        return len(self._vertices[0])

    def n_cells(self, dim: int) -> int:
        if dim < 0 or dim > self.max_dim:
            return 0
        return len(self._vertices[dim])

    def dim_range(self, dim: int) -> range:
        """Ids of the ``dim``-cells (a contiguous block)."""
        if dim < 0 or dim > self.max_dim:
            return range(0)
        return range(int(self._offsets[dim]), int(self._offsets[dim + 1]))

    def vertex_array(self, dim: int) -> np.ndarray:
        return self._vertices[dim]

    def boundary_array(self, dim: int) -> np.ndarray:
        return self._boundary[dim]

    @cached_property
    def dims(self) -> np.ndarray:
        out = np.repeat(np.arange(self.max_dim + 1), [len(v) for v in self._vertices])
        out.setflags(write=False)
        return out

    def cell(self, idx: int) -> Cell:
        d = int(self.dims[idx])
        row = idx - int(self._offsets[d])
        return Cell(
            id=int(idx),
            dim=d,
            vertices=tuple(int(v) for v in self._vertices[d][row]),
            boundary=tuple(int(b) for b in self._boundary[d][row]),
        )

    @cached_property
    def cells(self) -> tuple[Cell, ...]:
        return tuple(self.cell(i) for i in range(len(self)))

    def find(self, vertices: Iterable[int]) -> int:
        """Id of the cell with exactly these vertices."""
        key = tuple(sorted(int(v) for v in vertices))
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"no cell with vertices {key}") from None

    @cached_property
    def _index(self) -> dict:
        index = {}
        for d, block in enumerate(self._vertices):
            start = int(self._offsets[d])
            for row, verts in enumerate(block.tolist()):
                index[tuple(verts)] = start + row
        return index

    @classmethod
    def from_simplices(cls, simplices: Iterable[Sequence[int]]) -> "Complex":
        """Face closure of the given simplices as a simplicial complex."""
        closed: set[tuple[int, ...]] = set()
        for s in simplices:
            s = tuple(sorted(set(int(v) for v in s)))
            if not s:
                continue
            for k in range(1, len(s) + 1):
                closed.update(itertools.combinations(s, k))
        if not closed:
            raise ValueError("empty complex")
        vertex_ids = sorted(v for (v,) in (c for c in closed if len(c) == 1))
        if vertex_ids != list(range(len(vertex_ids))):
            raise ValueError("vertex labels must be 0..n-1")
        by_dim: dict[int, list] = {}
        for c in closed:
            by_dim.setdefault(len(c) - 1, []).append(c)
        top = max(by_dim)
        return _simplicial_from_blocks([sorted(by_dim[d]) for d in range(top + 1)])


def _simplicial_from_blocks(blocks):
    index = {}
    offset = 0
    for block in blocks:
        for i, s in enumerate(block):
            index[s] = offset + i
        offset += len(block)
    vertex_blocks, boundary_blocks = [], []
    for d, block in enumerate(blocks):
        vertex_blocks.append(np.array(block, dtype=np.int64).reshape(len(block), d + 1))
        if d == 0:
            boundary_blocks.append(np.empty((len(block), 0), dtype=np.int64))
        else:
            bnd = [[index[s[:k] + s[k + 1:]] for k in range(d + 1)] for s in block]
            boundary_blocks.append(np.array(bnd, dtype=np.int64).reshape(len(block), d + 1))
    return Complex(SIMPLICIAL, vertex_blocks, boundary_blocks)


def build_full_simplex(n_vertices: int, max_dim: int) -> Complex:
    """All subsets of ``{0..n-1}`` with at most ``max_dim + 1`` elements."""
    if n_vertices < 1:
        raise ValueError("n_vertices must be >= 1")
    if max_dim < 0 or max_dim >= n_vertices:
        raise ValueError(f"max_dim must satisfy 0 <= max_dim < n_vertices, got {max_dim}")
    blocks = [list(itertools.combinations(range(n_vertices), d + 1)) for d in range(max_dim + 1)]
    return _simplicial_from_blocks(blocks)


def build_path(n_vertices: int) -> Complex:
    """The path graph 0-1-...-(n-1)."""
    if n_vertices < 1:
        raise ValueError("n_vertices must be >= 1")
    if n_vertices == 1:
        return _simplicial_from_blocks([[(0,)]])
    return _simplicial_from_blocks([[(i,) for i in range(n_vertices)],
                                    [(i, i + 1) for i in range(n_vertices - 1)]])


def build_cubical_grid(height: int, width: int) -> Complex:
    """Cubical complex of an ``height x width`` image, pixels as vertices.

    Pixel ``(r, c)`` is vertex ``r * width + c``.  Edges join 4-neighbours and
    every 2x2 block of pixels spans one square.
    """
    if height < 1 or width < 1:
        raise ValueError(f"grid dimensions must be positive, got {height}x{width}")
    h, w = height, width
    pix = np.arange(h * w, dtype=np.int64).reshape(h, w)
    vertices = pix.reshape(-1, 1)

    horiz = np.stack([pix[:, :-1].ravel(), pix[:, 1:].ravel()], axis=1)
    vert = np.stack([pix[:-1, :].ravel(), pix[1:, :].ravel()], axis=1)
    edges = np.concatenate([horiz, vert]).reshape(-1, 2)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    vertex_blocks = [vertices]
    boundary_blocks = [np.empty((h * w, 0), dtype=np.int64)]
    if len(edges) == 0:
        return Complex(CUBICAL, vertex_blocks, boundary_blocks, shape=(h, w))

    n_v = h * w
    edge_id = {(int(a), int(b)): n_v + i for i, (a, b) in enumerate(edges.tolist())}
    vertex_blocks.append(edges)
    boundary_blocks.append(edges.copy())

    if h > 1 and w > 1:
        tl = pix[:-1, :-1].ravel()
        squares = np.stack([tl, tl + 1, tl + w, tl + w + 1], axis=1)
        bnd = np.array(
            [[edge_id[(a, b)], edge_id[(a, c)], edge_id[(b, d)], edge_id[(c, d)]]
             for a, b, c, d in squares.tolist()],
            dtype=np.int64,
        )
        bnd.sort(axis=1)
        vertex_blocks.append(squares)
        boundary_blocks.append(bnd)
    return Complex(CUBICAL, vertex_blocks, boundary_blocks, shape=(h, w))


class Filtration:
    """One finite float64 value per cell."""

    __slots__ = ("values",)

    def __init__(self, values):
        values = np.array(values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise ValueError("filtration values must be finite (NaN/inf found)")
        values.setflags(write=False)
        self.values = values

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f"Filtration({self.values!r})"


def validate_filtration(c: Complex, f) -> bool:
    """True iff ``f`` is monotone under the face relation of ``c``.

    Raises ``ValueError`` on a length mismatch, which is a usage error rather
    than a non-monotone filtration.
    """
    values = f.values if isinstance(f, Filtration) else np.asarray(f, dtype=np.float64)
    if len(values) != len(c):
        raise ValueError(f"filtration has {len(values)} values for {len(c)} cells")
    for d in range(1, c.max_dim + 1):
        own = values[c.dim_range(d).start:c.dim_range(d).stop]
        faces = values[c.boundary_array(d)]
        if np.any(faces > own[:, None]):
            return False
    return True


class GradTape:
    """Sparse Jacobian of filtration values with respect to parameters.

    Row ``i`` lists the ``(parameter, coefficient)`` pairs of cell ``i``; an
    empty row means the value does not depend on the parameters.
    """

    def __init__(self, jacobian):
        self.jacobian = sps.csr_matrix(jacobian, dtype=np.float64)

    @classmethod
    def from_entries(cls, n_rows, n_params, rows, cols, coefs):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        coefs = np.asarray(coefs, dtype=np.float64).ravel()
        if cols.size and (cols.min() < 0 or cols.max() >= n_params):
            raise ValueError("parameter index out of range")
        mat = sps.coo_matrix((coefs, (rows, cols)), shape=(n_rows, n_params))
        return cls(mat.tocsr())

    @property
    def n_rows(self) -> int:
        return self.jacobian.shape[0]

    @property
    def n_params(self) -> int:
        return self.jacobian.shape[1]

    def entries(self, row: int) -> list[tuple[int, float]]:
        lo, hi = self.jacobian.indptr[row], self.jacobian.indptr[row + 1]
        return [(int(j), float(v)) for j, v in
                zip(self.jacobian.indices[lo:hi], self.jacobian.data[lo:hi])]

    def compose(self, inner: "GradTape") -> "GradTape":
        """Chain rule: this tape's parameters are the rows of ``inner``."""
        if inner.n_rows != self.n_params:
            raise ValueError(f"cannot compose: {self.n_params} params vs {inner.n_rows} inner rows")
        return GradTape(self.jacobian @ inner.jacobian)

    def pullback(self, row_grad) -> np.ndarray:
        row_grad = np.asarray(row_grad, dtype=np.float64)
        if row_grad.shape != (self.n_rows,):
            raise ValueError(f"expected gradient of shape ({self.n_rows},), got {row_grad.shape}")
        return np.asarray(self.jacobian.T @ row_grad).ravel()

    def dense(self) -> np.ndarray:
        return self.jacobian.toarray()
