"""Stereo correspondence, inverse warping and stereo mixup"""

from .pair import StereoPair, build_stereo_pair
from .warp import CorrespondenceField, compute_correspondence, inverse_warp, stereo_mixup

__all__ = [
    "CorrespondenceField",
    "StereoPair",
    "build_stereo_pair",
    "compute_correspondence",
    "inverse_warp",
    "stereo_mixup",
]
