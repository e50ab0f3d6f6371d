"""Orthonormal multi-level 2D Haar transform and complex soft-thresholding.

Coefficients use the Mallat layout: an array with the input's shape whose
top-left ``(n >> levels)`` block is the coarsest approximation band.
"""

from __future__ import annotations

import numpy as np

_SQRT2 = np.sqrt(2.0)


def _check_levels(shape, levels):
    if levels < 0:
        raise ValueError(f"levels must be non-negative, got {levels}")
    step = 2**levels
    nrows, ncols = shape[-2:]
    if nrows % step or ncols % step:
        need = (-(-nrows // step) * step, -(-ncols // step) * step)
        raise ValueError(
            f"image {nrows}x{ncols} is not divisible by 2**{levels}; "
            f"pad to {need[0]}x{need[1]}"
        )


def _analysis(x, axis):
    even = np.take(x, np.arange(0, x.shape[axis], 2), axis=axis)
    odd = np.take(x, np.arange(1, x.shape[axis], 2), axis=axis)
    return np.concatenate([(even + odd) / _SQRT2, (even - odd) / _SQRT2], axis=axis)


def _synthesis(c, axis):
    n = c.shape[axis] // 2
    a = np.take(c, np.arange(n), axis=axis)
    d = np.take(c, np.arange(n, 2 * n), axis=axis)
    out_shape = list(c.shape)
    out = np.empty(out_shape, dtype=c.dtype)
    idx = [slice(None)] * c.ndim
    idx[axis] = slice(0, None, 2)
    out[tuple(idx)] = (a + d) / _SQRT2
    idx[axis] = slice(1, None, 2)
    out[tuple(idx)] = (a - d) / _SQRT2
    return out


def haar_dwt(x, levels: int = 3) -> np.ndarray:
    x = np.asarray(x)
    _check_levels(x.shape, levels)
    coeffs = x.astype(np.result_type(x.dtype, np.float64), copy=True)
    nr, nc = coeffs.shape[-2:]
    for _ in range(levels):
        band = coeffs[..., :nr, :nc]
        band = _analysis(_analysis(band, -2), -1)
        coeffs[..., :nr, :nc] = band
        nr //= 2
        nc //= 2
    return coeffs


def haar_idwt(coeffs, levels: int = 3) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    _check_levels(coeffs.shape, levels)
    x = coeffs.astype(np.result_type(coeffs.dtype, np.float64), copy=True)
    nrows, ncols = x.shape[-2:]
    for lev in reversed(range(levels)):
        nr, nc = nrows >> lev, ncols >> lev
        x[..., :nr, :nc] = _synthesis(_synthesis(x[..., :nr, :nc], -1), -2)
    return x


def soft_threshold(v, t: float):
    """Shrink magnitudes by ``t`` keeping phase: ``max(|v| - t, 0) * v / |v|``."""
    v = np.asarray(v)
    if t == 0:
        return v
    mag = np.abs(v)
    scale = np.maximum(mag - t, 0.0)
    return np.divide(scale, mag, out=np.zeros_like(mag), where=mag > 0) * v
