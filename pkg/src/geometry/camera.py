"""Camera poses, intrinsics, rigid transforms and perspective projection

Conventions: world up is +y, cameras sit on a sphere and look at the origin,
and camera frames are right-handed with the optical axis along -z. Image v
grows downward, so projection flips the camera y axis.
"""

from __future__ import annotations

from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..engine import Tensor, as_tensor, stack, where
from .exceptions import GeometryError

PROJECTION_EPS = 1e-8

POSE_PRESETS: dict[str, tuple[str, float, float]] = {
    "celebahq": ("gaussian", 0.3, 0.155),
    "ffhq": ("gaussian", 0.3, 0.155),
    "afhqv2": ("uniform", 0.4, 0.2),
}


class Intrinsics(BaseModel):
    """Pinhole intrinsics in pixels"""

    model_config = ConfigDict(frozen=True)

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    @model_validator(mode="after")
    def _check_positive(self) -> Intrinsics:
        if self.fx <= 0 or self.fy <= 0:
            raise GeometryError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if self.width < 1 or self.height < 1:
            raise GeometryError(f"image size must be positive, got {self.width}x{self.height}")
        return self

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]], dtype=np.float64
        )

    def scaled(self, width: int, height: int) -> Intrinsics:
        """Same field of view at another resolution"""
        sx, sy = width / self.width, height / self.height
        return Intrinsics(
            fx=self.fx * sx, fy=self.fy * sy, cx=self.cx * sx, cy=self.cy * sy,
            width=width, height=height,
        )


class CameraPose(BaseModel):
    """Viewpoint on a sphere around the origin"""

    model_config = ConfigDict(frozen=True)

    pitch: float = 0.0
    yaw: float = 0.0
    radius: float = 1.0

    @field_validator("pitch")
    @classmethod
    def _check_pitch(cls, value: float) -> float:
        if not abs(value) < np.pi / 2:
            raise GeometryError(f"|pitch| must be below pi/2, got {value}")
        return value

    @field_validator("radius")
    @classmethod
    def _check_radius(cls, value: float) -> float:
        if value <= 0:
            raise GeometryError(f"radius must be positive, got {value}")
        return value

    @property
    def center(self) -> np.ndarray:
        """Camera center in world coordinates"""
        cp = np.cos(self.pitch)
        direction = np.array(
            [cp * np.sin(self.yaw), np.sin(self.pitch), cp * np.cos(self.yaw)], dtype=np.float64
        )
        return self.radius * direction

    def lerp(self, other: CameraPose, t: float) -> CameraPose:
        return CameraPose(
            pitch=(1 - t) * self.pitch + t * other.pitch,
            yaw=(1 - t) * self.yaw + t * other.yaw,
            radius=(1 - t) * self.radius + t * other.radius,
        )


class RigidTransform:
    """x -> R x + t with R a proper rotation"""

    def __init__(self, R: np.ndarray, t: np.ndarray):
        self.R = np.asarray(R, dtype=np.float64).reshape(3, 3)
        self.t = np.asarray(t, dtype=np.float64).reshape(3)

    @classmethod
    def identity(cls) -> RigidTransform:
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform [..., 3] points"""
        return np.asarray(points, dtype=np.float64) @ self.R.T + self.t

    def inverse(self) -> RigidTransform:
        return RigidTransform(self.R.T, -self.R.T @ self.t)

    def compose(self, first: RigidTransform) -> RigidTransform:
        """self after first"""
        return RigidTransform(self.R @ first.R, self.R @ first.t + self.t)

    def is_valid(self, tol: float = 1e-5) -> bool:
        orthonormal = np.allclose(self.R.T @ self.R, np.eye(3), atol=tol)
        return bool(orthonormal and abs(np.linalg.det(self.R) - 1.0) < tol)

    def __repr__(self) -> str:
        return f"RigidTransform(R={self.R.tolist()}, t={self.t.tolist()})"


class PoseDistribution(BaseModel):
    """Prior over yaw (horizontal) and pitch (vertical) angles"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["gaussian", "uniform"] = "gaussian"
    h_spread: float = 0.3
    v_spread: float = 0.155
    radius: float = 1.0

    @model_validator(mode="after")
    def _check_spreads(self) -> PoseDistribution:
        if self.h_spread <= 0 or self.v_spread <= 0:
            raise GeometryError(
                f"pose spreads must be positive, got h={self.h_spread}, v={self.v_spread}"
            )
        if self.kind == "uniform" and self.v_spread >= np.pi / 2:
            raise GeometryError(f"uniform pitch range must stay below pi/2, got {self.v_spread}")
        if self.kind == "gaussian" and 3 * self.v_spread >= np.pi / 2:
            raise GeometryError(f"gaussian pitch spread too wide: {self.v_spread}")
        return self


def pose_from_preset(name: str, radius: float = 1.0) -> PoseDistribution:
    """
    Pose prior used for a named face or animal dataset

    Args:
        name: celebahq, ffhq or afhqv2
        radius: Camera distance

    Returns:
        PoseDistribution for that dataset
    """
    key = name.lower()
    if key not in POSE_PRESETS:
        raise GeometryError(f"Unknown pose preset: {name}. Choose from {sorted(POSE_PRESETS)}")
    kind, h_spread, v_spread = POSE_PRESETS[key]
    return PoseDistribution(kind=kind, h_spread=h_spread, v_spread=v_spread, radius=radius)


def sample_pose(dist: PoseDistribution, rng: np.random.Generator) -> CameraPose:
    """
    Draw one camera pose

    Gaussian draws are clamped to three spreads; for the uniform kind the
    spread is the half-range.
    """
    if dist.kind == "gaussian":
        yaw = float(np.clip(rng.normal(0.0, dist.h_spread), -3 * dist.h_spread, 3 * dist.h_spread))
        pitch = float(
            np.clip(rng.normal(0.0, dist.v_spread), -3 * dist.v_spread, 3 * dist.v_spread)
        )
    else:
        yaw = float(rng.uniform(-dist.h_spread, dist.h_spread))
        pitch = float(rng.uniform(-dist.v_spread, dist.v_spread))
    return CameraPose(pitch=pitch, yaw=yaw, radius=dist.radius)


def intrinsics_from_fov(fov_deg: float, width: int, height: int | None = None) -> Intrinsics:
    """
    Square-pixel intrinsics for a horizontal field of view

    Args:
        fov_deg: Field of view in degrees, in (0, 180)
        width: Image width in pixels
        height: Image height in pixels (defaults to width)

    Returns:
        Intrinsics with the principal point at the image center
    """
    if not 0 < fov_deg < 180:
        raise GeometryError(f"fov_deg must be in (0, 180), got {fov_deg}")
    height = width if height is None else height
    focal = (width / 2.0) / np.tan(np.deg2rad(fov_deg) / 2.0)
    return Intrinsics(fx=focal, fy=focal, cx=width / 2.0, cy=height / 2.0, width=width, height=height)


def pose_to_extrinsics(pose: CameraPose) -> RigidTransform:
    """
    World-to-camera transform of a look-at camera

    Rows of R are the camera right, up and back axes in world coordinates,
    so the camera looks along its -z axis.
    """
    center = pose.center
    back = center / np.linalg.norm(center)
    right = np.cross(np.array([0.0, 1.0, 0.0]), back)
    norm = np.linalg.norm(right)
    if norm < 1e-12:
        raise GeometryError(f"degenerate look-at for pitch {pose.pitch}")
    right /= norm
    up = np.cross(back, right)
    R = np.stack([right, up, back])
    return RigidTransform(R, -R @ center)


def relative_transform(pri: CameraPose, aux: CameraPose) -> RigidTransform:
    """Map primary-camera coordinates to auxiliary-camera coordinates"""
    return pose_to_extrinsics(aux).compose(pose_to_extrinsics(pri).inverse())


def project(points: Any, K: Intrinsics) -> tuple[Tensor, Tensor, Tensor, np.ndarray]:
    """
    Perspective projection of camera-frame points

    Works on plain arrays and on tensors; the result stays differentiable
    with respect to the points.

    Args:
        points: Camera-frame points of shape [..., 3]
        K: Intrinsics

    Returns:
        (u, v, depth, valid) where depth is the distance along the optical
        axis and valid marks points at least PROJECTION_EPS in front
    """
    points = as_tensor(points)
    depth = -points[..., 2]
    valid = depth.data > PROJECTION_EPS
    safe = where(valid, depth, 1.0)
    u = points[..., 0] / safe * K.fx + K.cx
    v = -points[..., 1] / safe * K.fy + K.cy
    return u, v, depth, valid


def unproject(u: Any, v: Any, depth: Any, K: Intrinsics) -> Tensor:
    """
    Camera-frame point at pixel (u, v) and axis depth

    Returns:
        Points of shape [..., 3]
    """
    u, v, depth = as_tensor(u), as_tensor(v), as_tensor(depth)
    x = (u - K.cx) / K.fx * depth
    y = -(v - K.cy) / K.fy * depth
    return stack([x, y, -depth], axis=-1)


def pixel_centers(K: Intrinsics) -> tuple[np.ndarray, np.ndarray]:
    """Pixel-center coordinates (i + 0.5) as [H, W] grids of u and v"""
    u, v = np.meshgrid(
        np.arange(K.width, dtype=np.float64) + 0.5,
        np.arange(K.height, dtype=np.float64) + 0.5,
    )
    return u, v
