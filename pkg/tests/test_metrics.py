import math

import numpy as np
import pytest

from pmrecon import psnr, ssim
from pmrecon.metrics import ssim_map
from oracles import psnr_loops, ssim_loops


def test_identical_psnr_is_inf(rng):
    x = rng.random((8, 8))
    assert psnr(x, x) == math.inf


def test_psnr_closed_form():
    ref = np.zeros((10, 10))
    ref[0, 0] = 1.0
    assert psnr(ref + 0.1, ref) == pytest.approx(20.0, abs=1e-12)


def test_psnr_errors():
    with pytest.raises(ValueError):
        psnr(np.zeros((3, 3)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        psnr(np.zeros((3, 3)), np.ones((3, 4)))


def test_psnr_matches_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        shape = tuple(rng.integers(4, 24, size=2))
        ref, recon = rng.random(shape), rng.random(shape)
        assert psnr(recon, ref) == pytest.approx(psnr_loops(recon.tolist(), ref.tolist()), abs=1e-10)


def test_psnr_monotone_in_noise(rng):
    ref = rng.random((32, 32))
    ref /= ref.max()
    noise = rng.standard_normal((32, 32))
    values = [psnr(ref + a * noise, ref) for a in (0.01, 0.05, 0.1)]
    assert values[0] > values[1] > values[2]


def test_ssim_identical():
    x = np.random.default_rng(0).random((16, 16))
    assert ssim(x, x) == 1.0


def test_ssim_constant_images():
    assert ssim(np.zeros((8, 8)), np.ones((8, 8))) == pytest.approx(1e-4 / 1.0001, rel=1e-12)


def test_ssim_matches_oracle():
    rng = np.random.default_rng(12)
    for _ in range(20):
        shape = tuple(rng.integers(7, 20, size=2))
        ref, recon = rng.random(shape), rng.random(shape)
        expected = ssim_loops(recon.tolist(), ref.tolist(), ref.max())
        assert ssim(recon, ref) == pytest.approx(expected, abs=1e-10)


def test_ssim_32_oracle():
    rng = np.random.default_rng(3)
    ref = rng.random((32, 32))
    recon = ref + 0.2 * rng.standard_normal((32, 32))
    assert ssim(recon, ref) == pytest.approx(ssim_loops(recon.tolist(), ref.tolist(), ref.max()), abs=1e-10)


def test_ssim_symmetric_with_fixed_range(rng):
    a, b = rng.random((20, 20)), rng.random((20, 20))
    assert ssim(a, b, data_range=1.0) == pytest.approx(ssim(b, a, data_range=1.0), abs=1e-14)


def test_ssim_bounded(rng):
    for _ in range(10):
        a = rng.standard_normal((16, 16))
        b = -a + 0.1 * rng.standard_normal((16, 16))
        m = ssim_map(a, np.abs(b))
        assert np.all(m <= 1) and np.all(m >= -1)


def test_ssim_too_small():
    with pytest.raises(ValueError):
        ssim(np.ones((6, 10)), np.zeros((6, 10)))
