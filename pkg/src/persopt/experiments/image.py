"""Remove small bright components from a noisy binary-ish image.

Bright components are the sublevel components of ``-I`` on the cubical grid,
so the topological term is the finite dim-0 total persistence of the
lower-star filtration of ``-I``.  Loss:
``weight_topo * T(I) + weight_binary * penalty_binary_image(I)``.
"""
from __future__ import annotations

import numpy as np

from ..complex import build_cubical_grid
from ..filtrations import lower_star_filtration
from ..io import read_image, write_csv, write_json
from ..losses import penalty_binary_image, total_persistence
from ..persistence import persistence_diagram, pull_back_gradient
from ..plotting import plot_images
from .common import ExperimentResult, Writer, optimize, summarize
from .config import ConfigError, ExperimentConfig
from .data import add_salt, digit_image

N_SNAPSHOTS = 10


def image_diagram(img, k):
    f, tape = lower_star_filtration(-np.asarray(img).ravel(), k)
    return persistence_diagram(k, f), tape


def topo_term(img, k):
    d, tape = image_diagram(img, k)
    t = total_persistence(d, dims=(0,))
    # lower-star of -I: d/dI = -d/df
    return t.value, -pull_back_gradient(d, t, tape), d


def make_objective(shape, weight_topo: float, weight_binary: float):
    k = build_cubical_grid(*shape)

    def objective(x):
        value, grad = 0.0, np.zeros_like(x)
        if weight_topo:
            t, g, _ = topo_term(x, k)
            value += weight_topo * t
            grad += weight_topo * g
        if weight_binary:
            p = penalty_binary_image(x)
            value += weight_binary * p.value
            grad += weight_binary * p.grad_aux
        return value, grad

    return objective, k


def load_input(cfg: ExperimentConfig) -> np.ndarray:
    if cfg["input"]:
        img = read_image(cfg["input"])
    else:
        rng = np.random.default_rng(cfg.seed)
        img = add_salt(digit_image(cfg["size"]), cfg["n_salt"], rng)
        if cfg["noise_level"] > 0:
            img = np.clip(img + cfg["noise_level"] * rng.random(img.shape), 0.0, 1.0)
    if img.ndim != 2 or img.min() < 0 or img.max() > 1:
        raise ConfigError("image must be a 2-D grayscale array with values in [0, 1]")
    return img


def run_image(cfg: ExperimentConfig, out=None) -> ExperimentResult:
    img0 = load_input(cfg)
    shape = img0.shape
    objective, k = make_objective(shape, cfg["weight_topo"], cfg["weight_binary"])
    every = max(cfg.stop.max_steps // N_SNAPSHOTS, 1)
    snapshots = [(0, image_diagram(img0, k)[0])]

    def snapshot(state):
        if state.k % every == 0:
            snapshots.append((state.k, image_diagram(state.x.reshape(shape), k)[0]))

    state = optimize(cfg, img0.ravel(), objective, callback=snapshot)
    img1 = state.x.reshape(shape)
    t0, _, d0 = topo_term(img0.ravel(), k)
    t1, _, d1 = topo_term(img1.ravel(), k)
    if snapshots[-1][0] != state.k:
        snapshots.append((state.k, d1))

    result = ExperimentResult("image", states={"main": state}, arrays={"initial": img0, "final": img1})
    result.metrics = summarize(cfg, state) | {
        "topo_initial": t0,
        "topo_final": t1,
        "topo_reduction": 1.0 - t1 / t0 if t0 > 0 else 0.0,
        "binary_penalty_final": penalty_binary_image(img1).value,
    }

    w = Writer(out, result)
    if w:
        write_csv(w.path("image_initial.csv"), img0)
        write_csv(w.path("image_final.csv"), img1)
        plot_images({"initial": img0, "final": img1}, w.path("images.svg"))
        w.trace(state)
        w.diagram(d0, "initial")
        w.diagram(d1, "final")
        write_json(w.path("diagram_sequence.json"),
                   [{"step": s, "diagram": d.to_json_obj()} for s, d in snapshots])
        w.summary(cfg, result.metrics)
    return result
