"""Primal-dual hybrid gradient reconstruction with Haar-wavelet sparsity.

Solves ``min_x 1/2 ||A x - y||^2 + alpha ||W x||_1`` with the SENSE-type
measurement operator ``A = M F S`` (coil maps, centered unitary FFT,
column mask) and an orthonormal Haar transform ``W``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from pmrecon.core import SamplingMask, ShapeError, as_kspace, next_multiple
from pmrecon.fourier import fft2c, ifft2c
from pmrecon.sensitivity import SensitivityMaps, estimate_sensitivities
from pmrecon.wavelet import haar_dwt, haar_idwt, soft_threshold

ALPHA_REL = 1e-3


@dataclass(frozen=True)
class PdhgConfig:
    n_iters: int = 25
    alpha: float | None = None  # None -> ALPHA_REL * max|A^H y|
    tau: float = 1.0
    sigma: float = 1.0
    theta: float = 1.0
    levels: int = 3
    support_threshold: float = 0.05

    def __post_init__(self):
        if self.n_iters < 0:
            raise ValueError(f"n_iters must be non-negative, got {self.n_iters}")
        if self.tau <= 0 or self.sigma <= 0:
            raise ValueError("step sizes must be positive")
        # ||A|| <= 1 for unitary FFT, RSS-normalised maps and a binary mask
        if self.tau * self.sigma > 1:
            raise ValueError(
                f"step sizes violate tau*sigma <= 1: tau={self.tau}, sigma={self.sigma}"
            )
        if self.alpha is not None and self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.levels < 0:
            raise ValueError(f"levels must be non-negative, got {self.levels}")


@dataclass
class PdhgResult:
    image: np.ndarray  # complex estimate
    alpha: float
    maps: SensitivityMaps
    padding: tuple[int, int] = (0, 0)
    history: list = field(default_factory=list)


def _maps_array(maps) -> np.ndarray:
    return maps.maps if isinstance(maps, SensitivityMaps) else np.asarray(maps)


def forward_op(x, maps, mask: SamplingMask) -> np.ndarray:
    """``A x``: weight by each coil map, FFT, zero unsampled columns."""
    s = _maps_array(maps)
    x = np.asarray(x)
    if x.shape != s.shape[1:] or s.shape[-1] != mask.ncols:
        raise ShapeError(f"image {x.shape}, maps {s.shape}, mask {mask.ncols} columns are inconsistent")
    return fft2c(s * x) * mask.sampled


def adjoint_op(y, maps, mask: SamplingMask) -> np.ndarray:
    """``A^H y``: zero unsampled columns, inverse FFT, conjugate-map coil sum."""
    s = _maps_array(maps)
    y = np.asarray(y)
    if y.shape != s.shape or y.shape[-1] != mask.ncols:
        raise ShapeError(f"k-space {y.shape}, maps {s.shape}, mask {mask.ncols} columns are inconsistent")
    coil_images = ifft2c(y * mask.sampled)
    # coil sum in fixed order
    return np.sum(np.conj(s) * coil_images, axis=0)


def _pad_shape(shape, levels):
    step = 2**levels
    return tuple(next_multiple(n, step) for n in shape)


class _Wavelet:
    """Haar transform with symmetric zero-padding to a multiple of ``2**levels``."""

    def __init__(self, shape, levels):
        self.shape = shape
        self.levels = levels
        padded = _pad_shape(shape, levels)
        self.pads = tuple(((p - n) // 2, p - n - (p - n) // 2) for n, p in zip(shape, padded))

    @property
    def padding(self):
        return tuple(sum(p) for p in self.pads)

    def forward(self, x):
        return haar_dwt(np.pad(x, self.pads), self.levels)

    def inverse(self, c):
        x = haar_idwt(c, self.levels)
        (r0, _), (c0, _) = self.pads
        return x[r0 : r0 + self.shape[0], c0 : c0 + self.shape[1]]

    def prox(self, v, t):
        if t == 0:
            return v
        return self.inverse(soft_threshold(self.forward(v), t))


def objective(x, y, maps, mask: SamplingMask, alpha: float, levels: int = 3) -> float:
    """``1/2 ||A x - y||^2 + alpha ||W x||_1``."""
    r = forward_op(x, maps, mask) - y
    wav = _Wavelet(np.shape(x), levels)
    return 0.5 * float(np.vdot(r, r).real) + alpha * float(np.abs(wav.forward(x)).sum())


def pdhg_solve(under, mask: SamplingMask, config: PdhgConfig | None = None, maps=None,
               callback: Callable[[int, np.ndarray], None] | None = None) -> PdhgResult:
    """Run the primal-dual iteration and return the complex estimate.

    ``maps`` defaults to :func:`estimate_sensitivities` on the ACS. The
    optional ``callback(k, x)`` is invoked with the initial point (``k=0``)
    and after every iteration.
    """
    config = config or PdhgConfig()
    y = as_kspace(under)
    if y.shape[-1] != mask.ncols:
        raise ShapeError(f"mask has {mask.ncols} columns, k-space has {y.shape[-1]}")
    if maps is None:
        maps = estimate_sensitivities(y, mask, threshold=config.support_threshold)
    elif not isinstance(maps, SensitivityMaps):
        maps = SensitivityMaps(maps=np.asarray(maps, dtype=np.complex128), eps=0.0)
    y = y * mask.sampled

    x = adjoint_op(y, maps, mask)
    alpha = config.alpha
    if alpha is None:
        alpha = ALPHA_REL * float(np.abs(x).max())
    wav = _Wavelet(x.shape, config.levels)
    tau, sigma, theta = config.tau, config.sigma, config.theta

    z = np.zeros_like(y)
    x_bar = x.copy()
    if callback is not None:
        callback(0, x)
    for k in range(1, config.n_iters + 1):
        z = (z + sigma * (forward_op(x_bar, maps, mask) - y)) / (1 + sigma)
        x_prev = x
        x = wav.prox(x - tau * adjoint_op(z, maps, mask), tau * alpha)
        x_bar = x + theta * (x - x_prev)
        if callback is not None:
            callback(k, x)
    return PdhgResult(image=x, alpha=alpha, maps=maps, padding=wav.padding)


def pdhg_reconstruct(under, mask: SamplingMask, config: PdhgConfig | None = None, maps=None) -> np.ndarray:
    """Magnitude of the PDHG estimate."""
    return np.abs(pdhg_solve(under, mask, config, maps).image)
