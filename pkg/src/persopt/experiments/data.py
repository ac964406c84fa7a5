"""Synthetic inputs for the experiments.  All generators take a ``numpy`` Generator."""
from __future__ import annotations

import numpy as np

__all__ = [
    "uniform_cloud",
    "digit_image",
    "add_salt",
    "noisy_circle",
    "circle_sample",
    "three_peak_beta",
    "regression_data",
    "bar_images",
]


def uniform_cloud(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.random((n, 2))


def digit_image(size: int = 20) -> np.ndarray:
    """Binary "0": an elliptic ring centred in a ``size x size`` frame."""
    if size < 8:
        raise ValueError("digit image needs size >= 8")
    r, c = np.mgrid[0:size, 0:size].astype(np.float64)
    mid = (size - 1) / 2.0
    q = ((r - mid) / (0.35 * size)) ** 2 + ((c - mid) / (0.25 * size)) ** 2
    return ((q >= 0.55) & (q <= 1.0)).astype(np.float64)


def add_salt(image: np.ndarray, n_salt: int, rng: np.random.Generator) -> np.ndarray:
    """Set ``n_salt`` isolated background pixels to 1.

    Each salt pixel is at least two pixels (Chebyshev) away from the
    foreground and from the other salt pixels, so each is its own component.
    """
    out = np.array(image, dtype=np.float64)
    h, w = out.shape
    blocked = np.zeros((h, w), dtype=bool)

    def block(rr, cc):
        blocked[max(rr - 1, 0):rr + 2, max(cc - 1, 0):cc + 2] = True

    for rr, cc in zip(*np.nonzero(out > 0)):
        block(rr, cc)
    placed = 0
    for idx in rng.permutation(h * w):
        if placed == n_salt:
            break
        rr, cc = divmod(int(idx), w)
        if blocked[rr, cc]:
            continue
        out[rr, cc] = 1.0
        block(rr, cc)
        placed += 1
    if placed < n_salt:
        raise ValueError(f"room for only {placed} isolated salt pixels")
    return out


def circle_sample(n: int) -> np.ndarray:
    """``n`` evenly spaced points on the unit circle."""
    t = 2 * np.pi * np.arange(n) / n
    return np.stack([np.cos(t), np.sin(t)], axis=1)


def noisy_circle(n: int, n_outliers: int, noise: float, rng: np.random.Generator) -> np.ndarray:
    """Random points on the unit circle with radial noise plus interior outliers."""
    t = np.sort(rng.uniform(0, 2 * np.pi, n))
    radius = 1.0 + noise * rng.standard_normal(n)
    pts = np.stack([radius * np.cos(t), radius * np.sin(t)], axis=1)
    outliers = rng.uniform(-0.5, 0.5, (n_outliers, 2))
    return np.concatenate([pts, outliers])


def three_peak_beta(p: int, n_peaks: int = 3) -> np.ndarray:
    """Coefficients with ``n_peaks`` triangular bumps of height 1, zero elsewhere."""
    if p < 2 * n_peaks + 1:
        raise ValueError(f"p={p} cannot host {n_peaks} separated peaks")
    beta = np.zeros(p)
    idx = np.arange(p)
    half = max(p // (4 * n_peaks), 1)
    for k in range(n_peaks):
        centre = (2 * k + 1) * p // (2 * n_peaks)
        beta = np.maximum(beta, 1.0 - np.abs(idx - centre) / (half + 1))
    return beta


def regression_data(n: int, beta: np.ndarray, noise: float, rng: np.random.Generator):
    """Gaussian design ``X`` and responses ``X beta + noise * eps``."""
    X = rng.standard_normal((n, beta.size))
    y = X @ beta + noise * rng.standard_normal(n)
    return X, y


def bar_images(n_per_class: int, size: int, rng: np.random.Generator):
    """Two classes of binary images with two vertical bars each.

    Both classes have a bar in column 2; the second bar sits in column 5
    (class 0) or column ``size - 3`` (class 1).  Bar rows are random and
    identically distributed for both classes, so heights along the columns
    separate the classes while heights along the rows do not.
    """
    if size < 10:
        raise ValueError("bar images need size >= 10")
    images, labels = [], []
    for label, col in ((0, 5), (1, size - 3)):
        for _ in range(n_per_class):
            img = np.zeros((size, size))
            for c in (2, col):
                start = int(rng.integers(0, size // 3 + 1))
                length = int(rng.integers(size // 3, size - start + 1))
                img[start:start + length, c] = 1.0
            images.append(img)
            labels.append(label)
    return np.array(images), np.array(labels)
