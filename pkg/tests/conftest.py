import numpy as np
import pytest

from pmrecon.phantom import shepp_logan, simulate_coils

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def phantom128():
    img = shepp_logan(128, 128)
    kspace, maps = simulate_coils(img, 8, seed=0)
    return img, kspace, maps


@pytest.fixture(scope="session")
def phantom64():
    img = shepp_logan(64, 64)
    kspace, maps = simulate_coils(img, 8, seed=0)
    return img, kspace, maps


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def kernel_consistent_kspace(rng, ncoils=4, nrows=64, ncols=64, accel=2, nx=5):
    """Full k-space where every non-lattice sample is, by construction, a fixed
    linear combination of its bracketing lattice columns (readout wraps).

    Returns the k-space and the kernels, indexed [delta-1][source, target coil].
    """
    h = (nx - 1) // 2
    k = np.zeros((ncoils, nrows, ncols), dtype=complex)
    k[:, :, ::accel] = crandn(rng, ncoils, nrows, len(range(0, ncols, accel)))
    kernels = [crandn(rng, ncoils * 2 * nx, ncoils) * 0.1 for _ in range(accel - 1)]
    for c in range(ncols):
        delta = c % accel
        if delta == 0:
            continue
        w = kernels[delta - 1]
        src_cols = ((c - delta) % ncols, (c - delta + accel) % ncols)
        for r in range(nrows):
            src = [k[j, (r + x) % nrows, sc] for j in range(ncoils) for sc in src_cols for x in range(-h, h + 1)]
            k[:, r, c] = np.array(src) @ w
    return k, kernels


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
