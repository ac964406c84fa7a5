"""Linear regression with total-variation and topological priors on the coefficients.

Three fits from ``beta = 0``: squared error alone, plus total variation, and
plus the dim-0 total persistence of the sublevel filtration of ``beta`` on a
path after dropping its ``n_peaks`` most persistent points.
"""
from __future__ import annotations

import numpy as np

from ..complex import build_path
from ..filtrations import lower_star_filtration
from ..io import write_csv
from ..losses import penalty_mse, penalty_tv, total_persistence
from ..persistence import persistence_diagram, pull_back_gradient
from ..plotting import plot_coefficients, plot_series
from .common import ExperimentResult, Writer, optimize, summarize
from .config import ConfigError, ExperimentConfig
from .data import regression_data, three_peak_beta

VARIANTS = ("mse", "mse+tv", "mse+tv+topo")


def topo_term(beta, k, n_peaks):
    f, tape = lower_star_filtration(beta, k)
    d = persistence_diagram(k, f)
    t = total_persistence(d, dims=(0,), exclude_top=n_peaks)
    return t.value, pull_back_gradient(d, t, tape)


def make_objective(X, y, variant: str, weight_tv: float, weight_topo: float, n_peaks: int):
    k = build_path(X.shape[1])

    def objective(beta):
        m = penalty_mse(X, y, beta)
        value, grad = m.value, m.grad_aux.copy()
        if variant != "mse":
            tv = penalty_tv(beta)
            value += weight_tv * tv.value
            grad += weight_tv * tv.grad_aux
        if variant == "mse+tv+topo":
            t, g = topo_term(beta, k, n_peaks)
            value += weight_topo * t
            grad += weight_topo * g
        return value, grad

    return objective


def holdout_mse(X, y, beta) -> float:
    r = X @ beta - y
    return float(r @ r) / len(y)


def run_regression(cfg: ExperimentConfig, out=None) -> ExperimentResult:
    p, n_peaks = cfg["n_features"], cfg["n_peaks"]
    if p < 2 * n_peaks + 1 or n_peaks < 1:
        raise ConfigError(f"n_features={p} cannot host {n_peaks} peaks (need >= {2 * n_peaks + 1})")
    rng = np.random.default_rng(cfg.seed)
    beta_star = three_peak_beta(p, n_peaks)
    X, y = regression_data(cfg["n_samples"], beta_star, cfg["noise_level"], rng)
    X_test, y_test = regression_data(cfg["n_test"], beta_star, cfg["noise_level"], rng)

    result = ExperimentResult("regression", arrays={"beta_star": beta_star})
    for i, variant in enumerate(VARIANTS):
        obj = make_objective(X, y, variant, cfg["weight_tv"], cfg["weight_topo"], n_peaks)
        state = optimize(cfg, np.zeros(p), obj, seed_offset=i)
        result.states[variant] = state
        result.arrays[variant] = state.x.copy()
        result.metrics[variant] = summarize(cfg, state) | {"test_mse": holdout_mse(X_test, y_test, state.x)}

    w = Writer(out, result)
    if w:
        for variant in VARIANTS:
            w.trace(result.states[variant], name=f"trace_{variant}.csv", plot=f"loss_{variant}.svg")
        rows = [[j, beta_star[j]] + [result.arrays[v][j] for v in VARIANTS] for j in range(p)]
        write_csv(w.path("coefficients.csv"), rows, header=["index", "beta_star", *VARIANTS])
        write_csv(w.path("test_mse.csv"), [[v, result.metrics[v]["test_mse"]] for v in VARIANTS],
                  header=["variant", "test_mse"])
        plot_coefficients({"truth": beta_star, **{v: result.arrays[v] for v in VARIANTS}},
                          w.path("coefficients.svg"))
        plot_series({v: result.states[v].losses for v in VARIANTS}, w.path("losses.svg"),
                    ylabel="loss", title="regression losses")
        d = persistence_diagram(build_path(p), lower_star_filtration(result.arrays[VARIANTS[-1]],
                                                                     build_path(p))[0])
        w.diagram(d, "final")
        w.summary(cfg, result.metrics)
    return result
