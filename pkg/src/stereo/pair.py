"""Primary/auxiliary render pairs tied together by the stereo warp"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..engine import Tensor
from ..geometry import CameraPose, Intrinsics, relative_transform
from ..rendering import RenderedView, RenderOptions, render_view
from ..rendering.renderer import FieldFn
from .warp import CorrespondenceField, compute_correspondence, inverse_warp, stereo_mixup

OPACITY_THRESHOLD = 0.01


@dataclass
class StereoPair:
    primary: RenderedView
    auxiliary: RenderedView
    correspondence: CorrespondenceField
    valid: np.ndarray  # correspondence validity and primary opacity combined
    mixed: Tensor
    eta: float
    warped_color: Tensor | None = None
    warped_feature: Tensor | None = None

    @property
    def valid_fraction(self) -> float:
        return float(self.valid.mean())


def build_stereo_pair(
    field: FieldFn,
    w: Tensor | np.ndarray,
    pri_pose: CameraPose,
    aux_pose: CameraPose,
    K: Intrinsics,
    options: RenderOptions,
    rng: np.random.Generator,
    stage: int = 1,
    eta: float | None = None,
) -> StereoPair:
    """
    Render one identity from two viewpoints and mix the primary buffer with
    the auxiliary buffer warped into the primary view

    Stage 1 warps colors; stage 2 warps composited features. Both use the
    primary depth.

    Args:
        field: Radiance field callable
        w: Style vector shared by both views
        pri_pose: Primary camera pose
        aux_pose: Auxiliary camera pose
        K: Intrinsics of both renders
        options: Render options; want_feature is forced on in stage 2
        rng: Generator for stratified sampling and eta
        stage: 1 (image level) or 2 (feature level)
        eta: Mix coefficient; drawn uniformly from [0, 1] when None

    Returns:
        StereoPair
    """
    if stage not in (1, 2):
        raise ValueError(f"stage must be 1 or 2, got {stage}")
    opts = options.model_copy(update={"want_feature": stage == 2})
    primary = render_view(field, w, pri_pose, K, opts, rng)
    auxiliary = render_view(field, w, aux_pose, K, opts, rng)
    corr = compute_correspondence(primary.depth, K, relative_transform(pri_pose, aux_pose))
    valid = corr.valid & (primary.opacity.data > OPACITY_THRESHOLD)
    eta = float(rng.random()) if eta is None else float(eta)

    if stage == 1:
        warped, _ = inverse_warp(auxiliary.color, corr)
        mixed = stereo_mixup(primary.color, warped, eta)
        return StereoPair(primary, auxiliary, corr, valid, mixed, eta, warped_color=warped)

    warped, _ = inverse_warp(auxiliary.feature, corr)
    mixed = stereo_mixup(primary.feature, warped, eta)
    return StereoPair(primary, auxiliary, corr, valid, mixed, eta, warped_feature=warped)
