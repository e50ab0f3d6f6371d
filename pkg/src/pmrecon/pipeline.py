"""End-to-end reconstruction runs shared by the CLI and the tests."""

from __future__ import annotations

import time

import numpy as np

from pmrecon import grappa as _grappa
from pmrecon.core import MetricsReport, SamplingMask, as_kspace, rss_combine
from pmrecon.fourier import fft2c, ifft2c
from pmrecon.masking import apply_mask
from pmrecon.metrics import psnr, ssim
from pmrecon.pdhg import PdhgConfig, pdhg_solve

METHODS = ("grappa", "pdhg", "zerofill")


def zerofill_reconstruct(under, mask: SamplingMask) -> np.ndarray:
    return rss_combine(ifft2c(apply_mask(under, mask)))


def reconstruct(method: str, under, mask: SamplingMask, *, kx: int = 5, ky: int = 2,
                lam: float = _grappa.DEFAULT_LAMBDA, positions: str = "lattice",
                pdhg: PdhgConfig | None = None):
    """Run one method.

    Returns
    -------
    image : ndarray
        Magnitude reconstruction.
    kspace : ndarray
        Multi-coil k-space behind the image.
    params : dict
        Settings actually used (recorded in reports).
    """
    under = apply_mask(as_kspace(under), mask)
    if method == "zerofill":
        return rss_combine(ifft2c(under)), under, {}
    if method == "grappa":
        geometry = _grappa.KernelGeometry(accel=mask.accel, nx=kx, ny=ky, positions=positions)
        kspace = _grappa.grappa_reconstruct_kspace(under, mask, geometry, lam)
        params = {"kx": kx, "ky": ky, "lambda": lam, "positions": positions}
        return rss_combine(ifft2c(kspace)), kspace, params
    if method == "pdhg":
        config = pdhg or PdhgConfig()
        result = pdhg_solve(under, mask, config)
        params = {
            "alpha": result.alpha,
            "iters": config.n_iters,
            "levels": config.levels,
            "sigma": config.sigma,
            "tau": config.tau,
            "theta": config.theta,
            "wavelet_padding": list(result.padding),
        }
        kspace = fft2c(result.maps.maps * result.image)
        return np.abs(result.image), kspace, params
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def evaluate(method: str, image, ref, mask: SamplingMask | None = None, params=None,
             runtime_s: float | None = None) -> MetricsReport:
    return MetricsReport(
        method=method,
        psnr_db=psnr(image, ref),
        ssim=ssim(image, ref),
        accel=None if mask is None else mask.accel,
        acs_count=None if mask is None else mask.acs_count,
        params=dict(params or {}),
        runtime_s=runtime_s,
    )


def compare(under, mask: SamplingMask, ref, methods=METHODS, timing: bool = False, **kwargs):
    """Reconstruct with every method and score each against ``ref``."""
    reports = []
    for method in methods:
        start = time.perf_counter()
        image, _, params = reconstruct(method, under, mask, **kwargs)
        elapsed = time.perf_counter() - start
        reports.append(evaluate(method, image, ref, mask, params, elapsed if timing else None))
    return reports
