"""SVG figures for run outputs.

Rendering uses the non-interactive Agg backend with a fixed SVG hash salt
and no date metadata, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_trace", "plot_clouds", "plot_images", "plot_diagram", "plot_coefficients", "plot_series"]

_RC = {"svg.hashsalt": "persopt", "svg.fonttype": "none", "figure.dpi": 72}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_trace(losses, path, title="loss") -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(np.arange(len(losses)), losses, lw=1)
        ax.set_xlabel("step")
        ax.set_ylabel("loss")
        ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)


def plot_series(series: dict, path, xlabel="step", ylabel="", title="") -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for label, ys in series.items():
            ax.plot(np.arange(len(ys)), ys, lw=1, label=label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        fig.tight_layout()
        _save(fig, path)


def plot_clouds(clouds: dict, path, box=None) -> None:
    """Scatter one panel per named point cloud; ``box`` draws ``((x0, y0), (x1, y1))``."""
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, len(clouds), figsize=(3.5 * len(clouds), 3.5), squeeze=False)
        for ax, (name, pts) in zip(axes[0], clouds.items()):
            pts = np.asarray(pts)
            ax.scatter(pts[:, 0], pts[:, 1], s=8)
            if box is not None:
                (x0, y0), (x1, y1) = box
                ax.plot([x0, x1, x1, x0, x0], [y0, y0, y1, y1, y0], lw=0.8, color="grey")
            ax.set_aspect("equal")
            ax.set_title(name)
        fig.tight_layout()
        _save(fig, path)


def plot_images(images: dict, path) -> None:
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, len(images), figsize=(3 * len(images), 3), squeeze=False)
        for ax, (name, img) in zip(axes[0], images.items()):
            ax.imshow(np.asarray(img), cmap="gray", vmin=0, vmax=1, interpolation="nearest")
            ax.set_title(name)
            ax.set_xticks([])
            ax.set_yticks([])
        fig.tight_layout()
        _save(fig, path)


def plot_diagram(diagram, path, dims=None, title="diagram") -> None:
    """Regular points as dots, essential points on a dashed line above the finite range."""
    dims = diagram.dims if dims is None else dims
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 4))
        finite = [v for d in dims for v in np.concatenate([diagram[d].births, diagram[d].deaths,
                                                           diagram[d].essential])]
        lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
        pad = 0.05 * (hi - lo or 1.0)
        top = hi + 2 * pad
        for d in dims:
            part = diagram[d]
            ax.scatter(part.births, part.deaths, s=10, label=f"dim {d}")
            if len(part.essential):
                ax.scatter(part.essential, np.full(len(part.essential), top), marker="^", s=14)
        ax.plot([lo - pad, top], [lo - pad, top], lw=0.8, color="grey")
        ax.axhline(top, ls="--", lw=0.6, color="grey")
        ax.set_xlabel("birth")
        ax.set_ylabel("death")
        ax.set_title(title)
        ax.legend(loc="lower right")
        fig.tight_layout()
        _save(fig, path)


def plot_coefficients(curves: dict, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        for label, beta in curves.items():
            ax.plot(np.arange(len(beta)), beta, lw=1, label=label)
        ax.set_xlabel("index")
        ax.set_ylabel("coefficient")
        ax.legend()
        fig.tight_layout()
        _save(fig, path)
