"""Per-pixel ray bundles with stratified depth samples"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraPose, Intrinsics, pixel_centers, pose_to_extrinsics
from .exceptions import GeometryError


@dataclass
class RayBundle:
    """
    Rays through every pixel center of one view

    Sample depths are measured along the optical axis, so the composited
    depth is directly the z-depth that back-projection expects. A sample at
    depth d lies at origin + direction * d * z_scale.

    `sample_depths` and `deltas` are both axis depths; `path_lengths` applies
    z_scale to get the ray-length spacing compositing needs.
    """

    origins: np.ndarray  # [H, W, 3]
    directions: np.ndarray  # [H, W, 3], unit norm
    sample_depths: np.ndarray  # [H, W, N], axis depth
    deltas: np.ndarray  # [H, W, N], axis depth
    z_scale: np.ndarray  # [H, W], ray length per unit of axis depth
    near: float
    far: float

    @property
    def resolution(self) -> tuple[int, int]:
        return self.origins.shape[0], self.origins.shape[1]

    @property
    def n_samples(self) -> int:
        return self.sample_depths.shape[-1]

    def points(self) -> np.ndarray:
        """World-space sample locations of shape [H, W, N, 3]"""
        travel = self.sample_depths * self.z_scale[..., None]
        return self.origins[:, :, None, :] + self.directions[:, :, None, :] * travel[..., None]

    def path_lengths(self) -> np.ndarray:
        """Deltas converted to distances along each ray"""
        return self.deltas * self.z_scale[..., None]


def camera_directions(K: Intrinsics) -> tuple[np.ndarray, np.ndarray]:
    """
    Camera-frame ray directions through pixel centers

    Returns:
        (unit directions [H, W, 3], z_scale [H, W])
    """
    u, v = pixel_centers(K)
    raw = np.stack([(u - K.cx) / K.fx, -(v - K.cy) / K.fy, -np.ones_like(u)], axis=-1)
    z_scale = np.linalg.norm(raw, axis=-1)
    return raw / z_scale[..., None], z_scale


def generate_rays(
    K: Intrinsics,
    pose: CameraPose,
    near: float,
    far: float,
    n_samples: int,
    rng: np.random.Generator | None = None,
    stratified: bool = True,
) -> RayBundle:
    """
    Build the ray bundle of one view

    Args:
        K: Intrinsics
        pose: Camera pose
        near: Nearest sample depth
        far: Farthest sample depth
        n_samples: Samples per ray
        rng: Generator for the stratified jitter (required when stratified)
        stratified: Jitter each sample uniformly within its bin; otherwise
            place samples at bin centers

    Returns:
        RayBundle in world coordinates

    Raises:
        GeometryError: If the bounds or sample count are invalid
    """
    if not 0 < near < far:
        raise GeometryError(f"need 0 < near < far, got near={near}, far={far}")
    if n_samples < 1:
        raise GeometryError(f"n_samples must be at least 1, got {n_samples}")
    if stratified and rng is None:
        raise GeometryError("stratified sampling needs a random generator")

    extrinsics = pose_to_extrinsics(pose)
    dirs_cam, z_scale = camera_directions(K)
    directions = dirs_cam @ extrinsics.R  # R^T applied to row vectors
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    origins = np.broadcast_to(pose.center, directions.shape).copy()

    height, width = K.height, K.width
    bin_width = (far - near) / n_samples
    offsets = rng.random((height, width, n_samples)) if stratified else np.full(
        (height, width, n_samples), 0.5
    )
    depths = near + (np.arange(n_samples) + offsets) * bin_width
    deltas = np.concatenate([np.diff(depths, axis=-1), far - depths[..., -1:]], axis=-1)
    return RayBundle(
        origins=origins,
        directions=directions,
        sample_depths=depths,
        deltas=deltas,
        z_scale=z_scale,
        near=near,
        far=far,
    )
