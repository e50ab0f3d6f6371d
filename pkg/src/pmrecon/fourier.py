"""Centered, orthonormal 2D DFTs over the last two axes.

The DC sample sits at ``(nrows // 2, ncols // 2)`` in both domains, for
even and odd sizes alike.
"""

import numpy as np

_AXES = (-2, -1)


def ifft2c(kspace):
    """k-space -> image, unitary scaling ``1/sqrt(nrows*ncols)``."""
    x = np.fft.ifftshift(np.asarray(kspace), axes=_AXES)
    x = np.fft.ifft2(x, axes=_AXES, norm="ortho")
    return np.fft.fftshift(x, axes=_AXES)


def fft2c(images):
    """image -> k-space, the inverse (and adjoint) of :func:`ifft2c`."""
    x = np.fft.ifftshift(np.asarray(images), axes=_AXES)
    x = np.fft.fft2(x, axes=_AXES, norm="ortho")
    return np.fft.fftshift(x, axes=_AXES)
