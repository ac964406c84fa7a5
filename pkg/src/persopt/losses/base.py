from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DIAGONAL = -1


@dataclass
class LossValue:
    """A loss value with its subgradient.

    ``grad_regular[dim]`` is ``(n, 2)`` aligned with ``diagram[dim]``'s
    regular points as (d/dbirth, d/ddeath); ``grad_essential[dim]`` is
    aligned with its essential births.  ``grad_aux`` holds gradients of
    losses defined directly on parameters (penalties).  Batch losses put one
    ``LossValue`` per input diagram in ``per_diagram``.
    """

    value: float
    grad_regular: dict = field(default_factory=dict)
    grad_essential: dict = field(default_factory=dict)
    grad_aux: np.ndarray | None = None
    per_diagram: list | None = None

    def to_json_obj(self) -> dict:
        out = {
            "value": float(self.value),
            "grad_regular": {str(k): np.asarray(v).tolist() for k, v in self.grad_regular.items()},
            "grad_essential": {str(k): np.asarray(v).tolist() for k, v in self.grad_essential.items()},
        }
        if self.grad_aux is not None:
            out["grad_aux"] = np.asarray(self.grad_aux).tolist()
        if self.per_diagram is not None:
            out["per_diagram"] = [lv.to_json_obj() for lv in self.per_diagram]
        return out


@dataclass(frozen=True)
class Matching:
    """Partial matching between two diagrams' regular parts.

    Pairs index the regular points of each diagram in its stored order;
    ``DIAGONAL`` marks a match to the diagonal.
    """

    pairs: tuple[tuple[int, int], ...]
    costs: tuple[float, ...] = ()


def zero_grads(part):
    return np.zeros((len(part), 2))


def canonical_order(points: np.ndarray) -> np.ndarray:
    """Order of points by (birth, death); stable on exact duplicates."""
    points = np.asarray(points).reshape(-1, 2)
    return np.lexsort((points[:, 1], points[:, 0]))


def off_diagonal(part):
    """Indices (in stored order) of regular points with positive persistence."""
    return np.flatnonzero(part.deaths > part.births)
