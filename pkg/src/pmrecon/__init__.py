"""Classical parallel-MRI reconstruction: undersampling masks, GRAPPA,
PDHG with wavelet sparsity, PSNR/SSIM, and a multi-coil phantom."""

from pmrecon.core import SamplingMask, MetricsReport, crop_center, rss_combine
from pmrecon.fourier import fft2c, ifft2c
from pmrecon.masking import apply_mask, make_equidistant_mask, sampled_fraction
from pmrecon.grappa import (
    GrappaWeights,
    KernelGeometry,
    calibrate,
    grappa_reconstruct_image,
    grappa_reconstruct_kspace,
)
from pmrecon.pdhg import PdhgConfig, pdhg_reconstruct
from pmrecon.sensitivity import SensitivityMaps, estimate_sensitivities
from pmrecon.metrics import psnr, ssim
from pmrecon.phantom import add_noise, shepp_logan, simulate_coils

__version__ = "0.1.0"
