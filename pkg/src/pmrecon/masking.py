"""Equidistant Cartesian undersampling with a centered autocalibration block."""

from __future__ import annotations

import numpy as np

from pmrecon.core import SamplingMask, ShapeError, as_kspace

# Fraction of ncols used for the ACS block when none is given, keyed by
# "R <= 4" vs "R > 4".
ACS_FRACTION_LOW_ACCEL = 0.08
ACS_FRACTION_HIGH_ACCEL = 0.04


def default_acs_count(ncols: int, accel: int) -> int:
    """Conventional ACS width: ~8% of columns up to R=4, ~4% above.

    Never narrower than ``2 * accel``: narrower blocks leave the GRAPPA
    calibration too few positions to be well conditioned on small matrices.
    """
    frac = ACS_FRACTION_LOW_ACCEL if accel <= 4 else ACS_FRACTION_HIGH_ACCEL
    count = int(np.floor(frac * ncols + 0.5))
    if accel > 1:
        count = max(count, 2 * accel)
    return min(count, ncols)


def make_equidistant_mask(
    ncols: int, accel: int, acs_count: int, lattice_offset: int = 0
) -> SamplingMask:
    """Build the union of the lattice ``(c - offset) % accel == 0`` and a
    centered block of ``acs_count`` columns."""
    ncols, accel, acs_count, lattice_offset = map(int, (ncols, accel, acs_count, lattice_offset))
    if ncols < 1:
        raise ValueError(f"ncols must be positive, got {ncols}")
    if accel < 1:
        raise ValueError(f"acceleration must be >= 1, got {accel}")
    if not 0 <= lattice_offset < accel:
        raise ValueError(f"lattice offset must lie in [0, {accel}), got {lattice_offset}")
    if not 0 <= acs_count <= ncols:
        raise ValueError(f"acs_count must lie in [0, {ncols}], got {acs_count}")

    cols = np.arange(ncols)
    sampled = (cols - lattice_offset) % accel == 0
    acs_start = (ncols - acs_count) // 2
    sampled[acs_start : acs_start + acs_count] = True
    return SamplingMask(
        ncols=ncols,
        accel=accel,
        acs_start=acs_start,
        acs_count=acs_count,
        lattice_offset=lattice_offset,
        sampled=sampled,
    )


def expected_sampled(ncols, accel, acs_start, acs_count, lattice_offset) -> np.ndarray:
    cols = np.arange(ncols)
    sampled = (cols - lattice_offset) % accel == 0
    sampled[acs_start : acs_start + acs_count] = True
    return sampled


def apply_mask(full, mask: SamplingMask) -> np.ndarray:
    """Zero every unsampled column; sampled values are copied unchanged."""
    full = as_kspace(full)
    if full.shape[-1] != mask.ncols:
        raise ShapeError(f"mask has {mask.ncols} columns, k-space has {full.shape[-1]}")
    return np.where(mask.sampled, full, 0)


def sampled_fraction(mask: SamplingMask) -> float:
    return int(np.count_nonzero(mask.sampled)) / mask.ncols
