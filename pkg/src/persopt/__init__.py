"""Persistence diagrams of parametrized filtrations and subgradient descent on them."""
from .complex import (Cell, Complex, Filtration, GradTape, build_cubical_grid, build_full_simplex,
                      build_path, validate_filtration)
from .filtrations import (dtm_filtration, dtm_weights, height_filtration, lower_star_filtration,
                          rips_filtration, rips_from_matrix, weighted_rips_filtration)
from .persistence import (Diagram, DiagramPart, PairSet, TotalOrder, assemble_diagram, compute_pairs,
                          persistence_diagram, pull_back_gradient, total_order)

__version__ = "0.1.0"
