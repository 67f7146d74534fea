"""Vectorized per-cube statistics and cube-to-point reductions.

Internal engine shared by the maximal functions, weight diagnostics and
Morrey norms.  For each cube side m it produces per-corner statistics
(window sums, sorted windows, mins) and converts corner-indexed values to
point-indexed maxima.  All reductions run in a fixed size-major order, so
results are reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "window_sums",
    "window_matrix",
    "window_min",
    "corner_to_point_max",
    "dyadic_offsets",
]


def window_sums(values: np.ndarray, m: int) -> np.ndarray:
    """Sums over all m-windows (1D) or m x m windows (2D), corner-indexed."""
    if values.ndim == 1:
        p = np.concatenate([[0.0], np.cumsum(values)])
        return p[m:] - p[:-m]
    p = np.zeros((values.shape[0] + 1, values.shape[1] + 1))
    p[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)
    return p[m:, m:] - p[:-m, m:] - p[m:, :-m] + p[:-m, :-m]


def window_matrix(values: np.ndarray, m: int) -> np.ndarray:
    """All m-windows flattened to rows: shape (ncorners, m^dim)."""
    if values.ndim == 1:
        return sliding_window_view(values, m).reshape(-1, m)
    return sliding_window_view(values, (m, m)).reshape(-1, m * m)


def window_min(values: np.ndarray, m: int) -> np.ndarray:
    """Minimum over each window, corner-indexed (keeps grid shape)."""
    if values.ndim == 1:
        return sliding_window_view(values, m).min(axis=-1)
    return sliding_window_view(values, (m, m)).min(axis=(-2, -1))


def _axis_corner_max(arr: np.ndarray, m: int, n: int, axis: int) -> np.ndarray:
    """Per-point max over the m corners covering each point along one axis."""
    arr = np.moveaxis(arr, axis, -1)
    pad = np.full(arr.shape[:-1] + (m - 1,), -np.inf)
    padded = np.concatenate([pad, arr, pad], axis=-1)
    out = sliding_window_view(padded, m, axis=-1).max(axis=-1)
    out = out[..., :n]
    return np.moveaxis(out, -1, axis)


def corner_to_point_max(corner_vals: np.ndarray, m: int, n: int) -> np.ndarray:
    """Point-indexed max over all size-m cubes containing each point.

    corner_vals has length n - m + 1 per axis; the result has length n."""
    out = corner_vals
    for axis in range(corner_vals.ndim):
        out = _axis_corner_max(out, m, n, axis)
    return out


def dyadic_offsets(corner0: int, n0: int, m: int) -> range:
    """Local offsets of globally m-aligned windows inside a subarray."""
    start = (-corner0) % m
    return range(start, n0 - m + 1, m)
