"""Readers for point clouds, matrices and images; writers for run outputs.

Parse errors carry the 1-based line number of the offending input line.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = ["ParseError", "read_csv_matrix", "read_pgm", "read_image", "write_csv", "write_json"]


class ParseError(ValueError):
    pass


def read_csv_matrix(path, min_cols: int = 1) -> np.ndarray:
    """Numeric CSV with rows of equal length; blank and ``#`` lines are skipped.

    A non-numeric first data line is taken as a header and skipped.
    """
    rows = []
    width = None
    seen_header = False
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = next(csv.reader([text]))
            try:
                row = [float(x) for x in fields]
            except ValueError:
                if not rows and not seen_header:
                    seen_header = True
                    continue
                raise ParseError(f"{path}:{lineno}: non-numeric field in {text!r}") from None
            if not all(np.isfinite(row)):
                raise ParseError(f"{path}:{lineno}: non-finite value")
            if width is None:
                width = len(row)
                if width < min_cols:
                    raise ParseError(f"{path}:{lineno}: expected at least {min_cols} columns, got {width}")
            elif len(row) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
            rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.array(rows)


def _pgm_tokens(data: bytes):
    """Yield (token, line) pairs from a PGM header/body, skipping comments."""
    line = 1
    i, n = 0, len(data)
    while i < n:
        ch = data[i:i + 1]
        if ch == b"#":
            while i < n and data[i:i + 1] != b"\n":
                i += 1
            continue
        if ch.isspace():
            line += ch == b"\n"
            i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
            j += 1
        yield data[i:j], line, j
        i = j


def read_pgm(path) -> np.ndarray:
    """Read a P2 (ASCII) or P5 (binary) PGM and scale to ``[0, 1]``."""
    data = Path(path).read_bytes()
    tokens = _pgm_tokens(data)
    header = []
    try:
        for _ in range(4):
            header.append(next(tokens))
    except StopIteration:
        raise ParseError(f"{path}: truncated PGM header") from None
    magic = header[0][0]
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"{path}:{header[0][1]}: expected P2 or P5, got {magic!r}")
    try:
        w, h, maxval = (int(t) for t, _, _ in header[1:])
    except ValueError:
        raise ParseError(f"{path}:{header[-1][1]}: bad width/height/maxval") from None
    if w < 1 or h < 1 or not 0 < maxval < 65536:
        raise ParseError(f"{path}:{header[-1][1]}: bad width/height/maxval")
    if magic == b"P5":
        start = header[-1][2] + 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[start:start + w * h * dtype.itemsize]
        if len(raw) < w * h * dtype.itemsize:
            raise ParseError(f"{path}: binary PGM body has {len(raw)} bytes, need {w * h * dtype.itemsize}")
        pix = np.frombuffer(raw, dtype=dtype).astype(np.float64)
    else:
        vals = []
        for tok, line, _ in tokens:
            try:
                v = int(tok)
            except ValueError:
                raise ParseError(f"{path}:{line}: non-integer pixel {tok!r}") from None
            if not 0 <= v <= maxval:
                raise ParseError(f"{path}:{line}: pixel {v} outside [0, {maxval}]")
            vals.append(v)
        if len(vals) != w * h:
            raise ParseError(f"{path}: expected {w * h} pixels, got {len(vals)}")
        pix = np.array(vals, dtype=np.float64)
    if pix.max(initial=0) > maxval:
        raise ParseError(f"{path}: pixel above maxval {maxval}")
    return (pix / maxval).reshape(h, w)


def read_image(path) -> np.ndarray:
    """Grayscale image in ``[0, 1]`` from PGM or CSV (one image row per line)."""
    if str(path).lower().endswith(".pgm"):
        return read_pgm(path)
    img = read_csv_matrix(path)
    if img.min() < 0 or img.max() > 1:
        raise ParseError(f"{path}: grayscale values must lie in [0, 1]")
    return img


def write_csv(path, rows, header=None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=False)
        fh.write("\n")
