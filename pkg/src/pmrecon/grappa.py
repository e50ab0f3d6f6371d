"""GRAPPA calibration and k-space interpolation (no noise decorrelation).

Each missing column ``c`` at lattice distance ``delta = (c - offset) % R``
is synthesised from the two acquired lattice columns that bracket it,
``c - delta`` and ``c - delta + R``, over ``nx`` readout neighbours and all
coils. One kernel per ``delta`` is fitted on the ACS block and applied
everywhere (shift-invariant). Sources outside the grid read as zero.

By default only ACS positions whose target sits at lattice distance
``delta`` (so the sources are true lattice columns) enter the fit. With
``positions="all"`` the kernel slides over every ACS position instead,
which gives R times more training rows.

Source vectors are laid out coil-major, then phase tap (``-delta`` before
``R - delta``), then readout tap (``-h .. h`` with ``h = (nx - 1) // 2``).
Calibration rows are in raster order over (target row, target column).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pmrecon.core import SamplingMask, ShapeError, as_kspace, rss_combine
from pmrecon.fourier import ifft2c

DEFAULT_LAMBDA = 1e-4


class CalibrationError(ValueError):
    """The ACS block cannot support the requested kernel."""


@dataclass(frozen=True)
class KernelGeometry:
    accel: int
    nx: int = 5
    ny: int = 2
    positions: str = "lattice"

    def __post_init__(self):
        if self.positions not in ("lattice", "all"):
            raise ValueError(f"positions must be 'lattice' or 'all', got {self.positions!r}")
        if self.nx < 1 or self.nx % 2 == 0:
            raise ValueError(f"readout kernel size must be odd and positive, got {self.nx}")
        if self.ny != 2:
            raise ValueError(f"only two phase taps (bracketing lattice columns) are supported, got {self.ny}")
        if self.accel < 2:
            raise ValueError(f"GRAPPA needs acceleration >= 2, got {self.accel}")

    @property
    def half(self) -> int:
        return (self.nx - 1) // 2

    def n_sources(self, ncoils: int) -> int:
        return ncoils * self.ny * self.nx

    def phase_taps(self, delta: int) -> tuple[int, int]:
        return (-delta, self.accel - delta)


@dataclass(frozen=True)
class GrappaWeights:
    """Fitted kernels, ``weights[delta - 1]`` has shape ``(n_sources, ncoils)``;
    column ``k`` is the kernel for target coil ``k``."""

    geometry: KernelGeometry
    lam: float
    weights: np.ndarray

    @property
    def ncoils(self) -> int:
        return self.weights.shape[-1]


def _check_geometry(mask: SamplingMask, geometry: KernelGeometry | None) -> KernelGeometry:
    if mask.accel < 2:
        raise ValueError(f"GRAPPA needs acceleration >= 2, mask has R={mask.accel}")
    if geometry is None:
        return KernelGeometry(accel=mask.accel)
    if geometry.accel != mask.accel:
        raise ValueError(f"kernel built for R={geometry.accel}, mask has R={mask.accel}")
    return geometry


def build_calibration_system(kspace, mask: SamplingMask, geometry: KernelGeometry, delta: int):
    """Source matrix ``S`` and target matrix ``T`` from sliding positions inside the ACS.

    Returns
    -------
    S : ndarray, shape (npos, ncoils * ny * nx)
    T : ndarray, shape (npos, ncoils)
    """
    kspace = as_kspace(kspace)
    ncoils, nrows, ncols = kspace.shape
    if ncols != mask.ncols:
        raise ShapeError(f"mask has {mask.ncols} columns, k-space has {ncols}")
    R, h = geometry.accel, geometry.half
    if not 1 <= delta < R:
        raise ValueError(f"offset delta must lie in [1, {R}), got {delta}")
    if mask.acs_count < R + 1 or nrows < geometry.nx:
        raise CalibrationError(
            f"ACS too small for GRAPPA: need at least {R + 1} ACS columns and "
            f"{geometry.nx} rows, got {mask.acs_count} columns and {nrows} rows"
        )

    a0 = mask.acs_start
    a1 = a0 + mask.acs_count
    rows = np.arange(h, nrows - h)
    cols = np.arange(a0 + delta, a1 - R + delta)
    if geometry.positions == "lattice":
        cols = cols[(cols - delta - mask.lattice_offset) % R == 0]
    if cols.size == 0:
        raise CalibrationError(
            f"ACS columns [{a0}, {a1}) contain no calibration position for offset "
            f"{delta}; need at least {R + 1} ACS columns starting on a lattice column"
        )
    taps_y = np.array(geometry.phase_taps(delta))
    taps_x = np.arange(-h, h + 1)

    # index grids broadcast to (nrow_pos, ncol_pos, ncoils, ny, nx)
    r_idx = rows[:, None, None, None, None] + taps_x[None, None, None, None, :]
    c_idx = cols[None, :, None, None, None] + taps_y[None, None, None, :, None]
    coil = np.arange(ncoils)[None, None, :, None, None]
    S = kspace[coil, r_idx, c_idx].reshape(rows.size * cols.size, -1)
    T = kspace[:, rows[:, None], cols[None, :]]  # (ncoils, nr, nc)
    T = T.transpose(1, 2, 0).reshape(rows.size * cols.size, ncoils)
    return S, T


def solve_weights(S, T, lam: float) -> np.ndarray:
    """Tikhonov-regularised least squares ``(S^H S + lam_eff I)^-1 S^H T``.

    ``lam`` is relative: ``lam_eff = lam * trace(S^H S) / S.shape[1]``. With
    ``lam == 0`` the minimum-norm least-squares solution is returned.
    """
    S = np.asarray(S, dtype=np.complex128)
    T = np.asarray(T, dtype=np.complex128)
    if S.size == 0:
        raise CalibrationError("empty calibration system")
    if lam < 0:
        raise ValueError(f"regularisation must be non-negative, got {lam}")
    if not (np.all(np.isfinite(S)) and np.all(np.isfinite(T))):
        raise ValueError("calibration system contains non-finite entries")
    if lam == 0:
        w, *_ = np.linalg.lstsq(S, T, rcond=None)
        return w
    n = S.shape[1]
    gram = S.conj().T @ S
    lam_eff = lam * np.real(np.trace(gram)) / n
    if lam_eff == 0:
        w, *_ = np.linalg.lstsq(S, T, rcond=None)
        return w
    gram[np.diag_indices(n)] += lam_eff
    return np.linalg.solve(gram, S.conj().T @ T)


def calibrate(kspace, mask: SamplingMask, geometry: KernelGeometry | None = None,
              lam: float = DEFAULT_LAMBDA) -> GrappaWeights:
    """Fit one kernel per missing offset from the ACS block."""
    geometry = _check_geometry(mask, geometry)
    kspace = as_kspace(kspace)
    ws = []
    for delta in range(1, geometry.accel):
        S, T = build_calibration_system(kspace, mask, geometry, delta)
        ws.append(solve_weights(S, T, lam))
    return GrappaWeights(geometry=geometry, lam=float(lam), weights=np.stack(ws))


def apply_weights(under, mask: SamplingMask, weights: GrappaWeights) -> np.ndarray:
    """Fill every unsampled column; acquired columns are left untouched."""
    under = as_kspace(under)
    ncoils, nrows, ncols = under.shape
    geometry = weights.geometry
    R, h = geometry.accel, geometry.half
    if weights.ncoils != ncoils:
        raise ShapeError(f"weights fitted for {weights.ncoils} coils, data has {ncoils}")

    padded = np.pad(under, ((0, 0), (h, h), (R, R)))
    out = under.copy()
    cols = np.arange(ncols)
    lattice_delta = (cols - mask.lattice_offset) % R
    taps_x = np.arange(-h, h + 1)
    rows = np.arange(nrows)
    for delta in range(1, R):
        targets = cols[(lattice_delta == delta) & ~mask.sampled]
        if targets.size == 0:
            continue
        taps_y = np.array(geometry.phase_taps(delta))
        r_idx = rows[:, None, None, None, None] + h + taps_x[None, None, None, None, :]
        c_idx = targets[None, :, None, None, None] + R + taps_y[None, None, None, :, None]
        coil = np.arange(ncoils)[None, None, :, None, None]
        src = padded[coil, r_idx, c_idx].reshape(nrows * targets.size, -1)
        filled = src @ weights.weights[delta - 1]  # (nrows * ntargets, ncoils)
        out[:, :, targets] = filled.reshape(nrows, targets.size, ncoils).transpose(2, 0, 1)
    return out


def grappa_reconstruct_kspace(under, mask: SamplingMask, geometry: KernelGeometry | None = None,
                              lam: float = DEFAULT_LAMBDA) -> np.ndarray:
    under = as_kspace(under)
    weights = calibrate(under, mask, geometry, lam)
    return apply_weights(under, mask, weights)


def grappa_reconstruct_image(under, mask: SamplingMask, geometry: KernelGeometry | None = None,
                             lam: float = DEFAULT_LAMBDA) -> np.ndarray:
    """GRAPPA k-space completion followed by inverse FFT and RSS combination."""
    return rss_combine(ifft2c(grappa_reconstruct_kspace(under, mask, geometry, lam)))
