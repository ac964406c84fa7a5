"""Match the Rips diagram of a noisy circle with outliers to a clean circle's.

Loss: squared 2-Wasserstein distance between the regular parts in ``dim``.
"""
from __future__ import annotations

import numpy as np

from ..complex import build_full_simplex
from ..filtrations import rips_filtration
from ..io import write_csv
from ..losses import wasserstein
from ..persistence import persistence_diagram, pull_back_gradient
from ..plotting import plot_clouds
from .common import ExperimentResult, Writer, optimize, summarize
from .config import ConfigError, ExperimentConfig
from .data import circle_sample, noisy_circle


def make_objective(n_total: int, target, dim: int):
    k = build_full_simplex(n_total, dim + 1)

    def objective(x):
        f, tape = rips_filtration(x.reshape(n_total, 2), k)
        d = persistence_diagram(k, f)
        lv, _ = wasserstein(d, target, dim, p=2, power=True)
        return lv.value, pull_back_gradient(d, lv, tape)

    return objective, k


def run_circle_match(cfg: ExperimentConfig, out=None) -> ExperimentResult:
    n, n_out, dim = cfg["n_points"], cfg["n_outliers"], cfg["dim"]
    if n < 8:
        raise ConfigError("circle-match needs n_points >= 8")
    if n_out < 0 or dim not in (0, 1):
        raise ConfigError("circle-match needs n_outliers >= 0 and dim in {0, 1}")
    rng = np.random.default_rng(cfg.seed)
    x0 = noisy_circle(n, n_out, cfg["noise_level"], rng)
    clean = circle_sample(n + n_out)
    k = build_full_simplex(n + n_out, dim + 1)
    target = persistence_diagram(k, rips_filtration(clean, k)[0])
    objective, _ = make_objective(n + n_out, target, dim)
    state = optimize(cfg, x0.ravel(), objective)
    x1 = state.x.reshape(-1, 2)
    final = persistence_diagram(k, rips_filtration(x1, k)[0])

    result = ExperimentResult("circle-match", states={"main": state},
                              arrays={"initial": x0, "final": x1, "target": clean})
    m = summarize(cfg, state)
    m["loss_reduction"] = 1.0 - m["final_loss"] / m["initial_loss"] if m["initial_loss"] > 0 else 0.0
    result.metrics = m

    w = Writer(out, result)
    if w:
        write_csv(w.path("cloud_initial.csv"), x0, header=["x", "y"])
        write_csv(w.path("cloud_final.csv"), x1, header=["x", "y"])
        write_csv(w.path("cloud_target.csv"), clean, header=["x", "y"])
        plot_clouds({"initial": x0, "final": x1, "target": clean}, w.path("clouds.svg"))
        w.trace(state)
        w.diagram(target, "target")
        w.diagram(final, "final")
        w.summary(cfg, result.metrics)
    return result
