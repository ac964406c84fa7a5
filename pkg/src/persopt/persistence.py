"""Persistence pairs, diagrams, and gradient routing.

The reduction works over the two-element field.  Columns are stored as Python
integers used as bitsets over positions in the total order, so adding a column
is an XOR and the lowest nonzero row is ``bit_length() - 1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .complex import Complex, Filtration, GradTape, validate_filtration

__all__ = [
    "TotalOrder",
    "PairSet",
    "DiagramPart",
    "Diagram",
    "total_order",
    "compute_pairs",
    "assemble_diagram",
    "persistence_diagram",
    "pull_back_gradient",
]


@dataclass(frozen=True)
class TotalOrder:
    """Cells sorted by ``(value, dim, id)``.

    ``perm[r]`` is the cell at position ``r``; ``rank`` is the inverse.
    """

    perm: np.ndarray
    rank: np.ndarray
    values: np.ndarray
    dims: np.ndarray

    def keys(self):
        return [(float(self.values[c]), int(self.dims[c]), int(c)) for c in self.perm]


def total_order(c: Complex, f) -> TotalOrder:
    values = f.values if isinstance(f, Filtration) else Filtration(f).values
    if not validate_filtration(c, values):
        raise ValueError("filtration is not monotone under the face relation")
    ids = np.arange(len(c))
    perm = np.lexsort((ids, c.dims, values))
    rank = np.empty_like(perm)
    rank[perm] = ids
    return TotalOrder(perm=perm, rank=rank, values=values, dims=c.dims)


@dataclass
class PairSet:
    """Creator/destroyer cell ids per homology dimension plus unpaired creators."""

    pairs: dict[int, list[tuple[int, int]]] = field(default_factory=dict)
    essential: dict[int, list[int]] = field(default_factory=dict)

    def n_pairs(self) -> int:
        return sum(len(p) for p in self.pairs.values())

    def n_essential(self) -> int:
        return sum(len(e) for e in self.essential.values())


def compute_pairs(c: Complex, order: TotalOrder) -> PairSet:
    """Standard column reduction with clearing (twist).

    Dimensions are reduced from the top down; a column whose index already
    appeared as the pivot of a higher-dimensional column is a creator and is
    skipped.  Within a dimension columns are reduced left to right in the
    total order.
    """
    perm, rank = order.perm, order.rank
    pivot_owner: dict[int, int] = {}
    reduced: dict[int, int] = {}
    cleared: set[int] = set()
    raw_pairs: dict[int, list[tuple[int, int]]] = {d: [] for d in range(c.max_dim + 1)}

    for dim in range(c.max_dim, 0, -1):
        r = c.dim_range(dim)
        if not len(r):
            continue
        col_rank = rank[r.start:r.stop]
        todo = np.argsort(col_rank, kind="stable")
        bnd_rank = rank[c.boundary_array(dim)[todo]].tolist()
        for j, faces in zip(col_rank[todo].tolist(), bnd_rank):
            if j in cleared:
                continue
            col = 0
            for b in faces:
                col ^= 1 << b
            while col:
                low = col.bit_length() - 1
                other = pivot_owner.get(low)
                if other is None:
                    break
                col ^= reduced[other]
            if col:
                low = col.bit_length() - 1
                pivot_owner[low] = j
                reduced[j] = col
                cleared.add(low)
                raw_pairs[dim - 1].append((low, j))

    paired = np.zeros(len(c), dtype=bool)
    pairs: dict[int, list[tuple[int, int]]] = {}
    for dim, lst in raw_pairs.items():
        lst.sort()
        pairs[dim] = [(int(perm[a]), int(perm[b])) for a, b in lst]
        for a, b in pairs[dim]:
            paired[a] = paired[b] = True
    essential: dict[int, list[int]] = {}
    for dim in range(c.max_dim + 1):
        r = c.dim_range(dim)
        ids = np.arange(r.start, r.stop)
        ids = ids[~paired[ids]]
        essential[dim] = [int(i) for i in ids[np.argsort(rank[ids], kind="stable")]]
    return PairSet(pairs=pairs, essential=essential)


@dataclass(frozen=True)
class DiagramPart:
    """Diagram in one homology dimension with routing cells.

    Regular points are sorted by ``(birth, death, birth_cell)``; essential
    points by ``(birth, birth_cell)``.  Cell ids are ``-1`` for diagrams built
    from raw coordinates.
    """

    dim: int
    births: np.ndarray
    deaths: np.ndarray
    birth_cells: np.ndarray
    death_cells: np.ndarray
    essential: np.ndarray
    essential_cells: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return np.stack([self.births, self.deaths], axis=1).reshape(-1, 2)

    def __len__(self):
        return len(self.births)

    @classmethod
    def empty(cls, dim: int) -> "DiagramPart":
        z, zi = np.empty(0), np.empty(0, dtype=np.int64)
        return cls(dim, z, z, zi, zi, z, zi)


def _make_part(dim, births, deaths, bcells, dcells, ess, ecells) -> DiagramPart:
    births = np.asarray(births, dtype=np.float64).ravel()
    deaths = np.asarray(deaths, dtype=np.float64).ravel()
    bcells = np.asarray(bcells, dtype=np.int64).ravel()
    dcells = np.asarray(dcells, dtype=np.int64).ravel()
    ess = np.asarray(ess, dtype=np.float64).ravel()
    ecells = np.asarray(ecells, dtype=np.int64).ravel()
    o = np.lexsort((bcells, deaths, births))
    e = np.lexsort((ecells, ess))
    arrays = (births[o], deaths[o], bcells[o], dcells[o], ess[e], ecells[e])
    for a in arrays:
        a.setflags(write=False)
    return DiagramPart(dim, *arrays)


class Diagram:
    """Persistence diagram split by homology dimension."""

    def __init__(self, parts: dict[int, DiagramPart]):
        self.parts = dict(sorted(parts.items()))

    def __getitem__(self, dim: int) -> DiagramPart:
        part = self.parts.get(dim)
        return DiagramPart.empty(dim) if part is None else part

    def __contains__(self, dim):
        return dim in self.parts

    @property
    def dims(self) -> list[int]:
        return list(self.parts)

    def __repr__(self):
        body = ", ".join(f"{d}: {len(p)} regular/{len(p.essential)} essential"
                         for d, p in self.parts.items())
        return f"Diagram({{{body}}})"

    @classmethod
    def from_points(cls, regular=None, essential=None) -> "Diagram":
        """Diagram from coordinates, e.g. a fixed target.

        ``regular`` maps dim to an ``(n, 2)`` array-like of (birth, death);
        ``essential`` maps dim to a sequence of births.
        """
        regular = regular or {}
        essential = essential or {}
        parts = {}
        for dim in set(regular) | set(essential):
            pts = np.asarray(regular.get(dim, np.empty((0, 2))), dtype=np.float64).reshape(-1, 2)
            if np.any(pts[:, 1] < pts[:, 0]):
                raise ValueError("regular points need death >= birth")
            ess = np.asarray(essential.get(dim, []), dtype=np.float64).ravel()
            parts[dim] = _make_part(dim, pts[:, 0], pts[:, 1], -np.ones(len(pts)), -np.ones(len(pts)),
                                    ess, -np.ones(len(ess)))
        return cls(parts)

    def to_json_obj(self, cells: bool = False) -> list[dict]:
        out = []
        for dim, part in self.parts.items():
            entry = {
                "dim": dim,
                "regular": [[float(b), float(d)] for b, d in zip(part.births, part.deaths)],
                "essential": [float(b) for b in part.essential],
            }
            if cells:
                entry["cells"] = {
                    "regular": [[int(b), int(d)] for b, d in zip(part.birth_cells, part.death_cells)],
                    "essential": [int(c) for c in part.essential_cells],
                }
            out.append(entry)
        return out

    def to_json(self, cells: bool = False, **kwargs) -> str:
        return json.dumps(self.to_json_obj(cells=cells), **kwargs)

    @classmethod
    def from_json(cls, text) -> "Diagram":
        obj = json.loads(text) if isinstance(text, str) else text
        regular = {int(e["dim"]): e["regular"] for e in obj}
        essential = {int(e["dim"]): e["essential"] for e in obj}
        return cls.from_points(regular, essential)


def assemble_diagram(c: Complex, f, p: PairSet) -> Diagram:
    values = f.values if isinstance(f, Filtration) else np.asarray(f, dtype=np.float64)
    parts = {}
    for dim in range(c.max_dim + 1):
        pairs = np.array(p.pairs.get(dim, []), dtype=np.int64).reshape(-1, 2)
        ess = np.array(p.essential.get(dim, []), dtype=np.int64)
        parts[dim] = _make_part(dim, values[pairs[:, 0]], values[pairs[:, 1]],
                                pairs[:, 0], pairs[:, 1], values[ess], ess)
    return Diagram(parts)


def persistence_diagram(c: Complex, f) -> Diagram:
    """Total order, reduction and assembly in one call."""
    order = total_order(c, f)
    return assemble_diagram(c, order.values, compute_pairs(c, order))


def pull_back_gradient(d: Diagram, dL_dD, tape: GradTape) -> np.ndarray:
    """Route per-point diagram gradients to the filtration parameters.

    ``dL_dD`` is a ``LossValue`` or any object with ``grad_regular`` and
    ``grad_essential`` mappings from dimension to arrays shaped like the
    diagram's regular points ``(n, 2)`` and essential births ``(q,)``.
    """
    cell_grad = np.zeros(tape.n_rows)
    for dim, g in (getattr(dL_dD, "grad_regular", None) or {}).items():
        part = d[dim]
        g = np.asarray(g, dtype=np.float64).reshape(-1, 2) if np.size(g) else np.empty((0, 2))
        if len(g) != len(part):
            raise ValueError(f"dim {dim}: {len(g)} gradients for {len(part)} regular points")
        if len(part) and (part.birth_cells.min() < 0 or part.death_cells.max() >= tape.n_rows):
            raise ValueError(f"dim {dim}: diagram cells do not index this tape")
        np.add.at(cell_grad, part.birth_cells, g[:, 0])
        np.add.at(cell_grad, part.death_cells, g[:, 1])
    for dim, g in (getattr(dL_dD, "grad_essential", None) or {}).items():
        part = d[dim]
        g = np.asarray(g, dtype=np.float64).ravel()
        if len(g) != len(part.essential):
            raise ValueError(f"dim {dim}: {len(g)} gradients for {len(part.essential)} essential points")
        if len(g) and (part.essential_cells.min() < 0 or part.essential_cells.max() >= tape.n_rows):
            raise ValueError(f"dim {dim}: diagram cells do not index this tape")
        np.add.at(cell_grad, part.essential_cells, g)
    return tape.pullback(cell_grad)
