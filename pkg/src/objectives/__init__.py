"""Training objectives: re-projection, MRF, adversarial and R1"""

from .adversarial import LAMBDA_R1, R1Penalty, gan_d_loss, gan_g_loss, r1_penalty
from .report import COMPONENTS, LOG_COLUMNS, LossReport
from .reprojection import SSIM_WEIGHT, image_reproj_loss, mrf_loss, ssim

__all__ = [
    "COMPONENTS",
    "LAMBDA_R1",
    "LOG_COLUMNS",
    "SSIM_WEIGHT",
    "LossReport",
    "R1Penalty",
    "gan_d_loss",
    "gan_g_loss",
    "image_reproj_loss",
    "mrf_loss",
    "r1_penalty",
    "ssim",
]
