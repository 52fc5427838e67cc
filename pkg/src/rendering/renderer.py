"""Volume rendering of a radiance field from one camera pose"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..engine import Tensor
from ..geometry import CameraPose, Intrinsics, generate_rays
from ..geometry.rays import RayBundle
from .compositing import composite_color, composite_depth, composite_feature, composite_weights

FieldFn = Callable[..., tuple[Tensor, Tensor, Tensor]]


class RenderOptions(BaseModel):
    """Sampling and output switches of one render"""

    model_config = ConfigDict(frozen=True)

    n_samples: int = 12
    near: float = 0.88
    far: float = 1.12
    stratified: bool = True
    want_feature: bool = False
    background: tuple[float, float, float] | None = None

    @model_validator(mode="after")
    def _check(self) -> RenderOptions:
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be at least 1, got {self.n_samples}")
        if not 0 < self.near < self.far:
            raise ValueError(f"need 0 < near < far, got {self.near}, {self.far}")
        return self


@dataclass
class RenderedView:
    """Composited buffers of one view"""

    color: Tensor  # [3, H, W]
    depth: Tensor  # [H, W], axis depth, 0 on empty rays
    opacity: Tensor  # [H, W]
    pose: CameraPose
    intrinsics: Intrinsics
    feature: Tensor | None = None  # [F, H, W]


def render_rays(field: FieldFn, w: Tensor | np.ndarray, rays: RayBundle,
                want_feature: bool = False,
                background: tuple[float, float, float] | None = None
                ) -> tuple[Tensor, Tensor, Tensor, Tensor | None]:
    """
    Evaluate the field at every sample of a ray bundle and composite

    Returns:
        (color [H, W, 3], depth [H, W], opacity [H, W], feature [H, W, F] or None)
    """
    height, width = rays.resolution
    n = rays.n_samples
    points = rays.points().reshape(-1, 3)
    dirs = np.broadcast_to(rays.directions[:, :, None, :], (height, width, n, 3)).reshape(-1, 3)
    color, sigma, feature = field(points, dirs, w)
    weights = composite_weights(sigma.reshape(height, width, n), rays.path_lengths())
    rgb = composite_color(weights, color.reshape(height, width, n, 3), background)
    depth = composite_depth(weights, rays.sample_depths)
    opacity = weights.sum(axis=-1)
    feat = None
    if want_feature:
        feat = composite_feature(weights, feature.reshape(height, width, n, feature.shape[-1]))
    return rgb, depth, opacity, feat


def render_view(
    field: FieldFn,
    w: Tensor | np.ndarray,
    pose: CameraPose,
    K: Intrinsics,
    options: RenderOptions,
    rng: np.random.Generator | None = None,
) -> RenderedView:
    """
    Render color, depth, opacity and optionally features for one pose

    Args:
        field: Callable (points, directions, w) -> (color, sigma, feature)
        w: Style vector
        pose: Camera pose
        K: Intrinsics at the render resolution
        options: Sampling options
        rng: Generator for stratified sampling

    Returns:
        RenderedView with channel-first buffers
    """
    rays = generate_rays(
        K, pose, options.near, options.far, options.n_samples, rng, options.stratified
    )
    rgb, depth, opacity, feat = render_rays(field, w, rays, options.want_feature, options.background)
    return RenderedView(
        color=rgb.transpose(2, 0, 1),
        depth=depth,
        opacity=opacity,
        pose=pose,
        intrinsics=K,
        feature=None if feat is None else feat.transpose(2, 0, 1),
    )
