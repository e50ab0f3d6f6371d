import numpy as np
import pytest

from pmrecon import (
    PdhgConfig,
    apply_mask,
    estimate_sensitivities,
    ifft2c,
    make_equidistant_mask,
    pdhg_reconstruct,
    rss_combine,
)
from pmrecon.masking import default_acs_count
from pmrecon.pdhg import adjoint_op, forward_op, objective, pdhg_solve
from conftest import crandn


def random_maps(rng, ncoils, nr, nc):
    s = crandn(rng, ncoils, nr, nc)
    return s / np.sqrt(np.sum(np.abs(s) ** 2, axis=0))


def test_forward_zero():
    m = make_equidistant_mask(8, 2, 4)
    s = np.ones((2, 8, 8), complex)
    assert not np.any(forward_op(np.zeros((8, 8)), s, m))
    assert not np.any(adjoint_op(np.zeros((2, 8, 8)), s, m))


def test_identity_maps_full_mask(rng):
    from pmrecon import fft2c

    x = crandn(rng, 8, 10)
    y = crandn(rng, 1, 8, 10)
    m = make_equidistant_mask(10, 1, 0)
    s = np.ones((1, 8, 10), complex)
    assert np.array_equal(forward_op(x, s, m)[0], fft2c(x))
    assert np.array_equal(adjoint_op(y, s, m), ifft2c(y)[0])


def test_adjoint_dot_product(rng):
    for trial in range(25):
        nr, nc = rng.integers(4, 20, size=2)
        ncoils = int(rng.integers(1, 5))
        m = make_equidistant_mask(int(nc), int(rng.integers(1, 4)), int(rng.integers(0, nc)))
        s = random_maps(rng, ncoils, nr, nc)
        x, y = crandn(rng, nr, nc), crandn(rng, ncoils, nr, nc)
        lhs = np.vdot(y, forward_op(x, s, m))
        rhs = np.vdot(adjoint_op(y, s, m), x)
        assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)


def test_operator_norm_bound(phantom64):
    _, k, _ = phantom64
    m = make_equidistant_mask(64, 4, 12)
    s = estimate_sensitivities(apply_mask(k, m), m)
    x = crandn(np.random.default_rng(0), 64, 64)
    for _ in range(100):
        x = adjoint_op(forward_op(x, s, m), s, m)
        x /= np.linalg.norm(x)
    top = np.vdot(x, adjoint_op(forward_op(x, s, m), s, m)).real
    assert top <= 1 + 1e-8


def test_shape_mismatch(rng):
    m = make_equidistant_mask(8, 2, 4)
    with pytest.raises(ValueError):
        forward_op(np.zeros((8, 9)), np.ones((2, 8, 8)), m)


def test_step_size_contract():
    with pytest.raises(ValueError, match="tau\\*sigma"):
        PdhgConfig(tau=1.0, sigma=1.5)


def test_zero_data_fixed_point():
    m = make_equidistant_mask(32, 4, 8)
    out = pdhg_reconstruct(np.zeros((3, 32, 32), complex), m, PdhgConfig(alpha=0.1))
    assert np.all(out == 0)


def test_full_sampling_single_coil_converges(rng):
    y = crandn(rng, 1, 32, 32)
    m = make_equidistant_mask(32, 1, 0)
    out = pdhg_reconstruct(y, m, PdhgConfig(n_iters=200, alpha=0.0), maps=np.ones((1, 32, 32)))
    ref = np.abs(ifft2c(y)[0])
    assert np.linalg.norm(out - ref) / np.linalg.norm(ref) <= 1e-6


def test_full_sampling_estimated_single_coil_map(phantom64):
    img, k, _ = phantom64
    y = k[:1]
    m = make_equidistant_mask(64, 1, 64)
    out = pdhg_reconstruct(y, m, PdhgConfig(n_iters=200, alpha=0.0))
    ref = rss_combine(ifft2c(y))
    assert np.linalg.norm(out - ref) / np.linalg.norm(ref) <= 1e-6


@pytest.mark.parametrize("accel", [2, 4, 8])
def test_objective_and_residual_decrease(phantom128, accel):
    _, k, _ = phantom128
    m = make_equidistant_mask(128, accel, default_acs_count(128, accel))
    y = apply_mask(k, m)
    iterates = {}
    res = pdhg_solve(y, m, callback=lambda i, x: iterates.__setitem__(i, x))
    assert sorted(iterates) == list(range(26))
    obj0 = objective(iterates[0], y, res.maps, m, res.alpha)
    obj25 = objective(iterates[25], y, res.maps, m, res.alpha)
    assert obj25 <= obj0
    r0 = np.linalg.norm(forward_op(iterates[0], res.maps, m) - y)
    r25 = np.linalg.norm(forward_op(iterates[25], res.maps, m) - y)
    assert r25 < r0


def test_padding_for_indivisible_sizes(rng):
    img_k = crandn(rng, 2, 30, 36)
    m = make_equidistant_mask(36, 2, 8)
    res = pdhg_solve(apply_mask(img_k, m), m, PdhgConfig(levels=3))
    assert res.padding == (2, 4)
    assert res.image.shape == (30, 36)


def test_deterministic(phantom64):
    _, k, _ = phantom64
    m = make_equidistant_mask(64, 4, 8)
    y = apply_mask(k, m)
    assert np.array_equal(pdhg_reconstruct(y, m), pdhg_reconstruct(y, m))
