"""Coil sensitivity estimation from Hann-windowed ACS low-resolution images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pmrecon.core import SamplingMask, ShapeError, as_kspace, rss_combine
from pmrecon.fourier import ifft2c

MIN_ACS = 4
EPS_REL = 1e-12


@dataclass(frozen=True)
class SensitivityMaps:
    """RSS-normalised complex coil maps, ``maps`` has shape (ncoils, nrows, ncols)."""

    maps: np.ndarray
    eps: float
    lowres_rss: np.ndarray | None = None
    threshold: float = 0.05

    @property
    def support(self) -> np.ndarray:
        """Pixels where the low-resolution RSS exceeds ``threshold * max``."""
        if self.lowres_rss is None:
            return np.ones(self.maps.shape[1:], dtype=bool)
        return self.lowres_rss >= self.threshold * self.lowres_rss.max()


def hann_window(n: int) -> np.ndarray:
    """Symmetric Hann window, 0 at both ends and 1 at the centre (odd n)."""
    j = np.arange(n)
    return 0.5 - 0.5 * np.cos(2 * np.pi * j / (n - 1))


def estimate_sensitivities(under, mask: SamplingMask, threshold: float = 0.05) -> SensitivityMaps:
    under = as_kspace(under)
    if under.shape[-1] != mask.ncols:
        raise ShapeError(f"mask has {mask.ncols} columns, k-space has {under.shape[-1]}")
    if mask.acs_count < MIN_ACS:
        raise ValueError(
            f"sensitivity estimation needs at least {MIN_ACS} ACS columns, got {mask.acs_count}"
        )
    lowres_k = np.zeros_like(under)
    acs = slice(mask.acs_start, mask.acs_start + mask.acs_count)
    lowres_k[..., acs] = under[..., acs] * hann_window(mask.acs_count)
    lowres = ifft2c(lowres_k)
    rss = rss_combine(lowres)
    eps = EPS_REL * float(rss.max())
    denom = rss + eps
    maps = np.divide(lowres, denom, out=np.zeros_like(lowres), where=denom > 0)
    return SensitivityMaps(maps=maps, eps=eps, lowres_rss=rss, threshold=threshold)
