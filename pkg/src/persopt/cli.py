"""Command-line entry point.

``persopt <experiment> --config FILE --out DIR [--seed N]`` runs an experiment;
``persopt diagram INPUT --filtration KIND`` prints a diagram as JSON.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .complex import build_cubical_grid, build_full_simplex
from .experiments import EXPERIMENTS, ConfigError, load_config
from .filtrations import (dtm_filtration, height_filtration, lower_star_filtration, rips_filtration,
                          rips_from_matrix)
from .io import ParseError, read_csv_matrix, read_image
from .persistence import Diagram, persistence_diagram

log = logging.getLogger("persopt")

FILTRATIONS = ("rips", "dtm", "matrix", "lower-star", "height")


def _skeleton(n_vertices: int, max_dim: int):
    return build_full_simplex(n_vertices, min(max_dim + 1, n_vertices - 1))


def compute_diagram(path, kind: str, max_dim: int = 1, k_nn: int = 3, theta: float = 0.0):
    """Diagram of the filtration ``kind`` built from the file at ``path``."""
    if max_dim < 0:
        raise ValueError("max-dim must be >= 0")
    if kind in ("rips", "dtm"):
        x = read_csv_matrix(path)
        k = _skeleton(len(x), max_dim)
        f = rips_filtration(x, k)[0] if kind == "rips" else dtm_filtration(x, k_nn, k)[0]
    elif kind == "matrix":
        m = read_csv_matrix(path)
        k = _skeleton(len(m), max_dim)
        f = rips_from_matrix(m, k)[0]
    elif kind in ("lower-star", "height"):
        img = read_image(path)
        k = build_cubical_grid(*img.shape)
        values = img.ravel() if kind == "lower-star" else height_filtration(img, theta)[0]
        f = lower_star_filtration(values, k)[0]
    else:
        raise ValueError(f"unknown filtration {kind!r}; expected one of {FILTRATIONS}")
    d = persistence_diagram(k, f)
    # the top simplices of a truncated skeleton only kill classes below max_dim
    d = Diagram({dim: d[dim] for dim in d.dims if dim <= max_dim})
    _revalidate(d, f.values)
    return d


def _revalidate(d, values):
    vals = set(np.asarray(values).tolist())
    for dim in d.dims:
        part = d[dim]
        if np.any(part.deaths < part.births):
            raise AssertionError(f"dim {dim}: death below birth")
        coords = np.concatenate([part.births, part.deaths, part.essential]).tolist()
        if not all(c in vals for c in coords):
            raise AssertionError(f"dim {dim}: coordinate not among filtration values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="persopt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="flat key = value config file (defaults if omitted)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="override the config seed")
    p = sub.add_parser("diagram", help="compute a persistence diagram as JSON")
    p.add_argument("input", help="CSV point cloud or matrix, CSV/PGM image")
    p.add_argument("--filtration", choices=FILTRATIONS, default="rips")
    p.add_argument("--max-dim", type=int, default=1, help="highest homology dimension reported")
    p.add_argument("--k-nn", type=int, default=3, help="neighbours for dtm weights")
    p.add_argument("--theta", type=float, default=0.0, help="direction for height filtrations")
    p.add_argument("--cells", action="store_true", help="include creator/destroyer cell ids")
    p.add_argument("--out", help="write JSON here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "diagram":
            d = compute_diagram(args.input, args.filtration, args.max_dim, args.k_nn, args.theta)
            text = json.dumps(d.to_json_obj(cells=args.cells))
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return 0
        cfg = load_config(args.config, args.command, seed=args.seed)
        result = EXPERIMENTS[args.command](cfg, out=args.out)
    except (ConfigError, ParseError, ValueError, OSError) as exc:
        print(f"persopt: error: {exc}", file=sys.stderr)
        return 2
    for key, value in result.metrics.items():
        print(f"{key}: {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
