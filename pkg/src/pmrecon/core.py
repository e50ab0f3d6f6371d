"""Shared domain types and elementary tensor operations.

Multi-coil k-space and coil images are plain complex ``numpy`` arrays of
shape ``(ncoils, nrows, ncols)`` in C order (coil slowest, column fastest).
Rows are the fully sampled readout axis, columns the phase-encode axis.
Magnitude images are real ``float64`` arrays of shape ``(nrows, ncols)``;
complex intermediate images keep a complex dtype, so phase is never dropped
without an explicit ``np.abs`` or :func:`rss_combine`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ShapeError(ValueError):
    """Raised when array dimensions are inconsistent."""


def as_kspace(data) -> np.ndarray:
    """Validate and return multi-coil k-space as a complex128 array."""
    arr = np.asarray(data)
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ShapeError(f"k-space must have shape (ncoils, nrows, ncols), got {arr.shape}")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError("k-space contains non-finite samples")
    return arr


@dataclass(frozen=True)
class SamplingMask:
    """Per-column acquisition pattern: a periodic lattice plus a centered ACS block."""

    ncols: int
    accel: int
    acs_start: int
    acs_count: int
    lattice_offset: int
    sampled: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        sampled = np.asarray(self.sampled, dtype=bool)
        if sampled.shape != (self.ncols,):
            raise ShapeError(f"sampled must have length {self.ncols}")
        sampled.setflags(write=False)
        object.__setattr__(self, "sampled", sampled)

    @property
    def columns(self) -> np.ndarray:
        """Sorted indices of the sampled columns."""
        return np.flatnonzero(self.sampled)

    @property
    def acs_columns(self) -> range:
        return range(self.acs_start, self.acs_start + self.acs_count)

    def params(self) -> dict:
        return {
            "accel": self.accel,
            "acs_count": self.acs_count,
            "acs_start": self.acs_start,
            "lattice_offset": self.lattice_offset,
            "ncols": self.ncols,
        }

    def __eq__(self, other):
        if not isinstance(other, SamplingMask):
            return NotImplemented
        return self.params() == other.params() and np.array_equal(self.sampled, other.sampled)

    def __hash__(self):
        return hash(tuple(sorted(self.params().items())))


@dataclass(frozen=True)
class MetricsReport:
    """Quality figures for one reconstruction, with the settings that produced it."""

    method: str
    psnr_db: float
    ssim: float
    accel: int | None = None
    acs_count: int | None = None
    params: dict = field(default_factory=dict)
    runtime_s: float | None = None

    def __post_init__(self):
        if not self.ssim <= 1.0 + 1e-12:
            raise ValueError(f"ssim must be <= 1, got {self.ssim}")


def rss_combine(coil_images) -> np.ndarray:
    """Root-sum-of-squares coil combination.

    Parameters
    ----------
    coil_images : array_like, shape (ncoils, nrows, ncols)
        Complex coil images. A sequence of 2D arrays is accepted as well.

    Returns
    -------
    ndarray, shape (nrows, ncols)
        Magnitude image ``sqrt(sum_c |x_c|^2)``.
    """
    if isinstance(coil_images, (list, tuple)):
        shapes = {np.shape(im) for im in coil_images}
        if len(shapes) != 1:
            raise ShapeError(f"coil images have mismatched shapes: {sorted(shapes)}")
    x = np.asarray(coil_images)
    if x.ndim != 3:
        raise ShapeError(f"expected (ncoils, nrows, ncols), got shape {x.shape}")
    return np.sqrt(np.sum(x.real**2 + x.imag**2, axis=0))


def crop_center(img, out_rows: int, out_cols: int) -> np.ndarray:
    """Centered crop, starting at ``floor((n - out) / 2)`` along each axis."""
    img = np.asarray(img)
    nrows, ncols = img.shape[-2:]
    if out_rows > nrows or out_cols > ncols or out_rows < 1 or out_cols < 1:
        raise ShapeError(
            f"cannot crop {nrows}x{ncols} image to {out_rows}x{out_cols}"
        )
    r0 = (nrows - out_rows) // 2
    c0 = (ncols - out_cols) // 2
    return img[..., r0 : r0 + out_rows, c0 : c0 + out_cols]


def next_multiple(n: int, m: int) -> int:
    return int(math.ceil(n / m) * m)
