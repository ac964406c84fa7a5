"""Choose a height-filtration direction that separates two image classes.

The parameter is the angle ``theta``.  Each image's dim-0 diagram comes from
the lower-star filtration of its directional height on the cubical grid, and
the loss is the label-contrast ratio of sliced Wasserstein distances.
Landscape features before and after are scored with a nearest-centroid
classifier on held-out images.
"""
from __future__ import annotations

import logging
import math
import warnings

import numpy as np

from ..complex import build_cubical_grid
from ..filtrations import background_value, height_filtration, lower_star_filtration
from ..io import read_csv_matrix, write_csv
from ..losses import label_contrast_loss, landscape
from ..persistence import persistence_diagram, pull_back_gradient
from ..plotting import plot_series
from .common import ExperimentResult, Writer, optimize, summarize
from .config import ConfigError, ExperimentConfig
from .data import bar_images

log = logging.getLogger(__name__)


def image_diagram(img, theta, k):
    f, htape = height_filtration(img, theta)
    vals, ltape = lower_star_filtration(f, k)
    d = persistence_diagram(k, vals)
    return d, ltape.compose(htape)


def pick_batch(labels, batch_size, rng):
    """Indices of a mini-batch with at least two classes; ``batch_size <= 0`` means all."""
    n = len(labels)
    if batch_size <= 0 or batch_size >= n:
        return np.arange(n)
    while True:
        idx = np.sort(rng.choice(n, batch_size, replace=False))
        if len(set(labels[idx].tolist())) >= 2:
            return idx
        warnings.warn("mini-batch has a single class; resampling", RuntimeWarning)


def make_objective(images, labels, n_dirs, batch_size, rng):
    k = build_cubical_grid(*images.shape[1:])
    cap = background_value(images.shape[1:])

    def objective(x):
        theta = float(x[0])
        idx = pick_batch(labels, batch_size, rng)
        diagrams, tapes = zip(*(image_diagram(images[i], theta, k) for i in idx))
        lv = label_contrast_loss(diagrams, labels[idx], n_dirs=n_dirs, dim=0, essential_cap=cap)
        grad = sum(pull_back_gradient(d, g, t) for d, g, t in zip(diagrams, lv.per_diagram, tapes))
        return lv.value, np.asarray(grad, dtype=np.float64)

    return objective


def landscape_features(images, theta, k_max, resolution):
    k = build_cubical_grid(*images.shape[1:])
    cap = background_value(images.shape[1:])
    diagrams = [image_diagram(img, theta, k)[0] for img in images]
    lo = min(min(d[0].essential.min(initial=cap), d[0].births.min(initial=cap)) for d in diagrams)
    grid = np.linspace(lo, cap, resolution)
    return np.array([landscape(d, 0, k_max, grid, essential_cap=cap).values for d in diagrams])


def nearest_centroid_accuracy(train_x, train_y, test_x, test_y) -> float:
    classes = np.unique(train_y)
    centroids = np.array([train_x[train_y == c].mean(axis=0) for c in classes])
    dist = ((test_x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    pred = classes[np.argmin(dist, axis=1)]
    return float(np.mean(pred == test_y))


def load_images(cfg: ExperimentConfig, rng):
    """Train and test images with labels.

    An input CSV holds one image per row: the label, then the pixels in
    row-major order of a square binary image.  Even rows train, odd rows test.
    """
    if cfg["input"]:
        data = read_csv_matrix(cfg["input"], min_cols=2)
        side = math.isqrt(data.shape[1] - 1)
        if side * side != data.shape[1] - 1:
            raise ConfigError("image rows must hold a label and a square number of pixels")
        labels = data[:, 0].astype(np.int64)
        images = data[:, 1:].reshape(-1, side, side)
        return images[0::2], labels[0::2], images[1::2], labels[1::2]
    train = bar_images(cfg["n_per_class"], cfg["size"], rng)
    test = bar_images(cfg["n_per_class"], cfg["size"], rng)
    return (*train, *test)


def run_filter_select(cfg: ExperimentConfig, out=None) -> ExperimentResult:
    rng = np.random.default_rng(cfg.seed)
    x_train, y_train, x_test, y_test = load_images(cfg, rng)
    if len(np.unique(y_train)) < 2:
        raise ConfigError("filter-select needs at least two classes")
    objective = make_objective(x_train, y_train, cfg["n_dirs"], cfg["batch_size"], rng)
    theta0 = cfg["theta0"]
    thetas = [theta0]
    state = optimize(cfg, np.array([theta0]), objective, callback=lambda s: thetas.append(float(s.x[0])))
    theta1 = float(state.x[0])

    def score(theta):
        kmax, res = cfg["k_max"], cfg["resolution"]
        tr = landscape_features(x_train, theta, kmax, res)
        te = landscape_features(x_test, theta, kmax, res)
        return tr, te, nearest_centroid_accuracy(tr, y_train, te, y_test)

    tr0, te0, acc0 = score(theta0)
    tr1, te1, acc1 = score(theta1)
    result = ExperimentResult("filter-select", states={"main": state},
                              arrays={"features_before": tr0, "features_after": tr1,
                                      "thetas": np.array(thetas)})
    result.metrics = summarize(cfg, state) | {
        "theta_initial": theta0,
        "theta_final": theta1,
        "accuracy_before": acc0,
        "accuracy_after": acc1,
    }

    w = Writer(out, result)
    if w:
        w.trace(state)
        header = ["split", "label"] + [f"f{i}" for i in range(tr0.shape[1])]
        for tag, tr, te in (("before", tr0, te0), ("after", tr1, te1)):
            rows = [["train", int(l), *row] for l, row in zip(y_train, tr)]
            rows += [["test", int(l), *row] for l, row in zip(y_test, te)]
            write_csv(w.path(f"features_{tag}.csv"), rows, header=header)
        write_csv(w.path("accuracy.csv"), [["before", theta0, acc0], ["after", theta1, acc1]],
                  header=["stage", "theta", "accuracy"])
        write_csv(w.path("theta.csv"), enumerate(thetas), header=["step", "theta"])
        plot_series({"theta": thetas}, w.path("theta.svg"), ylabel="theta", title="direction")
        k = build_cubical_grid(*x_train.shape[1:])
        w.diagram(image_diagram(x_train[0], theta0, k)[0], "example_before")
        w.diagram(image_diagram(x_train[0], theta1, k)[0], "example_after")
        w.summary(cfg, result.metrics)
    return result
