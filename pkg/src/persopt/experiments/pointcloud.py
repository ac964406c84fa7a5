"""Grow holes in a point cloud kept inside the unit square.

Loss: ``weight_topo * hole_penalty(dim-1 Rips) + weight_square * penalty_square``.
"""
from __future__ import annotations

import numpy as np

from ..complex import build_full_simplex
from ..filtrations import rips_filtration
from ..io import write_csv
from ..losses import hole_penalty, penalty_square
from ..persistence import persistence_diagram, pull_back_gradient
from ..plotting import plot_clouds
from .common import ExperimentResult, Writer, optimize, summarize
from .config import ConfigError, ExperimentConfig
from .data import uniform_cloud


def make_objective(n: int, weight_topo: float, weight_square: float):
    k = build_full_simplex(n, 2)

    def objective(x):
        pts = x.reshape(n, 2)
        sq = penalty_square(pts)
        value, grad = weight_square * sq.value, weight_square * sq.grad_aux
        if weight_topo:
            f, tape = rips_filtration(pts, k)
            d = persistence_diagram(k, f)
            t = hole_penalty(d, dim=1)
            value += weight_topo * t.value
            grad = grad + weight_topo * pull_back_gradient(d, t, tape)
        return value, grad

    return objective, k


def run_pointcloud(cfg: ExperimentConfig, out=None) -> ExperimentResult:
    n = cfg["n_points"]
    if n < 4:
        raise ConfigError("pointcloud needs n_points >= 4")
    rng = np.random.default_rng(cfg.seed)
    x0 = uniform_cloud(n, rng)
    objective, k = make_objective(n, cfg["weight_topo"], cfg["weight_square"])
    state = optimize(cfg, x0.ravel(), objective)
    x1 = state.x.reshape(n, 2)

    final = persistence_diagram(k, rips_filtration(x1, k)[0])
    pers = final[1].deaths - final[1].births
    result = ExperimentResult("pointcloud", states={"main": state}, arrays={"initial": x0, "final": x1})
    result.metrics = summarize(cfg, state) | {
        "max_dim1_persistence": float(pers.max(initial=0.0)),
        "coord_min": float(x1.min()),
        "coord_max": float(x1.max()),
    }

    w = Writer(out, result)
    if w:
        write_csv(w.path("cloud_initial.csv"), x0, header=["x", "y"])
        write_csv(w.path("cloud_final.csv"), x1, header=["x", "y"])
        plot_clouds({"initial": x0, "final": x1}, w.path("clouds.svg"), box=((0, 0), (1, 1)))
        w.trace(state)
        w.diagram(final, "final", title="final Rips diagram")
        w.summary(cfg, result.metrics)
    return result
