"""PSNR and SSIM on magnitude images.

Both use the reference maximum as the data range. SSIM averages the local
index over every valid 7x7 uniform window (stride 1) with population
moments.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from pmrecon.core import ShapeError

WINDOW = 7
K1, K2 = 0.01, 0.03


def _pair(recon, ref):
    recon = np.asarray(recon, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if recon.shape != ref.shape or recon.ndim != 2:
        raise ShapeError(f"images must be 2D with equal shapes, got {recon.shape} and {ref.shape}")
    return recon, ref


def psnr(recon, ref, data_range: float | None = None) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` when ``recon == ref``."""
    recon, ref = _pair(recon, ref)
    if data_range is None:
        if not np.any(ref):
            raise ValueError("reference image is all zero")
        data_range = float(ref.max())
    mse = float(np.mean((recon - ref) ** 2))
    if mse == 0:
        return float("inf")
    return float(10 * np.log10(data_range**2 / mse))


def ssim_map(recon, ref, data_range: float | None = None) -> np.ndarray:
    recon, ref = _pair(recon, ref)
    if min(recon.shape) < WINDOW:
        raise ShapeError(f"images must be at least {WINDOW}x{WINDOW}, got {recon.shape}")
    if data_range is None:
        data_range = float(ref.max())
    c1 = (K1 * data_range) ** 2
    c2 = (K2 * data_range) ** 2

    def local_mean(a):
        return sliding_window_view(a, (WINDOW, WINDOW)).mean(axis=(-2, -1))

    mx, my = local_mean(recon), local_mean(ref)
    vx = local_mean(recon * recon) - mx * mx
    vy = local_mean(ref * ref) - my * my
    cxy = local_mean(recon * ref) - mx * my
    num = (2 * mx * my + c1) * (2 * cxy + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return num / den


def ssim(recon, ref, data_range: float | None = None) -> float:
    """Mean structural similarity over all valid 7x7 windows."""
    recon, ref = _pair(recon, ref)
    if np.array_equal(recon, ref):
        return 1.0
    return float(ssim_map(recon, ref, data_range).mean())
