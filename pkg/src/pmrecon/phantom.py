"""Synthetic ground truth: Shepp-Logan head, analytic coil maps, noise."""

from __future__ import annotations

import numpy as np

from pmrecon.core import as_kspace
from pmrecon.fourier import fft2c

# Modified Shepp-Logan (Toft) ellipses:
# intensity, semi-axis a (x), semi-axis b (y), centre x, centre y, angle (deg)
SHEPP_LOGAN_ELLIPSES = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)

MIN_SIZE = 16


def pixel_coordinates(nrows: int, ncols: int):
    """Normalised pixel-centre coordinates in ``[-1, 1]``; y points up."""
    x = (2 * np.arange(ncols) + 1) / ncols - 1
    y = 1 - (2 * np.arange(nrows) + 1) / nrows
    return np.meshgrid(x, y)


def shepp_logan(nrows: int = 256, ncols: int = 256) -> np.ndarray:
    if nrows < MIN_SIZE or ncols < MIN_SIZE:
        raise ValueError(f"phantom needs at least {MIN_SIZE}x{MIN_SIZE} pixels, got {nrows}x{ncols}")
    X, Y = pixel_coordinates(nrows, ncols)
    img = np.zeros((nrows, ncols))
    for rho, a, b, x0, y0, deg in SHEPP_LOGAN_ELLIPSES:
        phi = np.deg2rad(deg)
        c, s = np.cos(phi), np.sin(phi)
        dx, dy = X - x0, Y - y0
        u = dx * c + dy * s
        v = -dx * s + dy * c
        img[(u / a) ** 2 + (v / b) ** 2 <= 1] += rho
    img = np.clip(img, 0, None)
    return img / img.max()


def coil_maps(nrows: int, ncols: int, ncoils: int, seed: int = 0) -> np.ndarray:
    """Gaussian-lobe coil maps with per-coil linear phase, RSS-normalised.

    Lobe centres sit evenly on a circle of radius ``0.45 * min(nrows, ncols)``
    around the image centre; the lobe width (standard deviation) is half the
    smaller dimension. Phase ramps are drawn per coil from
    ``default_rng((seed, coil))``.
    """
    if ncoils < 1:
        raise ValueError(f"ncoils must be positive, got {ncoils}")
    n = min(nrows, ncols)
    radius, width = 0.45 * n, 0.5 * n
    cr, cc = (nrows - 1) / 2, (ncols - 1) / 2
    rr, cols = np.mgrid[0:nrows, 0:ncols].astype(np.float64)
    yn, xn = (rr - cr) / n, (cols - cc) / n

    raw = np.empty((ncoils, nrows, ncols), dtype=np.complex128)
    for k in range(ncoils):
        angle = 2 * np.pi * k / ncoils
        pr, pc = cr + radius * np.sin(angle), cc + radius * np.cos(angle)
        lobe = np.exp(-((rr - pr) ** 2 + (cols - pc) ** 2) / (2 * width**2))
        rng = np.random.default_rng((seed, k))
        phase0 = rng.uniform(-np.pi, np.pi)
        gy, gx = rng.uniform(-np.pi / 2, np.pi / 2, size=2)
        raw[k] = lobe * np.exp(1j * (phase0 + gx * xn + gy * yn))
    rss = np.sqrt(np.sum(np.abs(raw) ** 2, axis=0))
    return raw / rss


def simulate_coils(img, ncoils: int = 8, seed: int = 0):
    """Multi-coil k-space of ``img`` and the maps used to make it.

    Returns
    -------
    kspace : ndarray, shape (ncoils, nrows, ncols)
    maps : ndarray, shape (ncoils, nrows, ncols)
        Satisfy ``sum_c |maps_c|^2 == 1`` at every pixel.
    """
    img = np.asarray(img)
    maps = coil_maps(*img.shape, ncoils, seed)
    return fft2c(maps * img), maps


def add_noise(kspace, sigma: float, seed: int = 0) -> np.ndarray:
    """Add i.i.d. complex Gaussian noise with std ``sigma`` per real component."""
    kspace = as_kspace(kspace)
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return kspace.copy()
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(kspace.shape) + 1j * rng.standard_normal(kspace.shape)
    return kspace + sigma * noise
