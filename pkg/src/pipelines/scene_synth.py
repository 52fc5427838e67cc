"""Procedural textured scenes with exact depth"""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..geometry import CameraPose, Intrinsics, camera_directions, pose_to_extrinsics

LIGHT_DIRECTION = np.array([0.3, 0.5, 1.0]) / np.linalg.norm([0.3, 0.5, 1.0])
BLOB_HUES = (np.array([0.85, 0.35, 0.25]), np.array([0.25, 0.45, 0.85]))


class SyntheticScene(BaseModel):
    """
    A view-consistent scene around the origin

    Textures are functions of the 3D surface point, so every view of the same
    scene agrees exactly.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["textured_sphere", "textured_plane", "two_tone_blob"] = "textured_sphere"
    seed: int = 0
    sphere_radius: float = 0.1
    plane_z: float = 0.0
    blob_offset: float = 0.045
    blob_radius: float = 0.07
    shading: bool = True
    background: tuple[float, float, float] = (0.0, 0.0, 0.0)
    octaves: int = 3
    base_frequency: float = 8.0


def _hash3(ix: np.ndarray, iy: np.ndarray, iz: np.ndarray, seed: int) -> np.ndarray:
    """Integer lattice hash to [0, 1)"""
    with np.errstate(over="ignore"):
        h = (
            ix.astype(np.int64).view(np.uint64) * np.uint64(73856093)
            ^ iy.astype(np.int64).view(np.uint64) * np.uint64(19349663)
            ^ iz.astype(np.int64).view(np.uint64) * np.uint64(83492791)
            ^ np.uint64((seed * 2654435761) % 2**64)
        )
        h ^= h >> np.uint64(13)
        h *= np.uint64(0x5BD1E995)
        h ^= h >> np.uint64(15)
    return (h & np.uint64(0xFFFFFF)).astype(np.float64) / float(1 << 24)


def value_noise(points: np.ndarray, seed: int) -> np.ndarray:
    """Smoothly interpolated lattice noise in [0, 1) for [..., 3] points"""
    base = np.floor(points)
    t = points - base
    s = t * t * (3.0 - 2.0 * t)
    ix, iy, iz = (base[..., k].astype(np.int64) for k in range(3))
    out = np.zeros(points.shape[:-1])
    for dx in (0, 1):
        wx = s[..., 0] if dx else 1.0 - s[..., 0]
        for dy in (0, 1):
            wy = s[..., 1] if dy else 1.0 - s[..., 1]
            for dz in (0, 1):
                wz = s[..., 2] if dz else 1.0 - s[..., 2]
                out += wx * wy * wz * _hash3(ix + dx, iy + dy, iz + dz, seed)
    return out


def fractal_noise(points: np.ndarray, seed: int, octaves: int = 3,
                  base_frequency: float = 8.0) -> np.ndarray:
    """Sum of value-noise octaves, normalized to [0, 1)"""
    total = np.zeros(points.shape[:-1])
    norm = 0.0
    for k in range(octaves):
        amplitude = 0.5**k
        total += amplitude * value_noise(points * base_frequency * 2**k, seed * 101 + k)
        norm += amplitude
    return total / norm


def _sphere_hit(origin: np.ndarray, dirs: np.ndarray, center: np.ndarray,
                radius: float) -> np.ndarray:
    """Distance along unit rays to the first sphere hit, inf on a miss"""
    oc = origin - center
    b = dirs @ oc
    c = oc @ oc - radius * radius
    disc = b * b - c
    hit = disc >= 0
    root = np.sqrt(np.where(hit, disc, 0.0))
    s = -b - root
    s = np.where(s > 0, s, -b + root)
    return np.where(hit & (s > 0), s, np.inf)


def render_ground_truth(
    scene: SyntheticScene, pose: CameraPose, K: Intrinsics
) -> tuple[np.ndarray, np.ndarray]:
    """
    Ray-trace a scene analytically

    Args:
        scene: Scene description
        pose: Camera pose
        K: Intrinsics (the render resolution is K.width x K.height)

    Returns:
        (image [3, H, W] linear RGB in [0, 1], depth [H, W] optical-axis
        depth with 0 on background)
    """
    extrinsics = pose_to_extrinsics(pose)
    dirs_cam, z_scale = camera_directions(K)
    dirs = dirs_cam @ extrinsics.R
    origin = pose.center

    if scene.kind == "textured_sphere":
        distance = _sphere_hit(origin, dirs, np.zeros(3), scene.sphere_radius)
        label = np.zeros(distance.shape, dtype=int)
        centers = [np.zeros(3)]
    elif scene.kind == "two_tone_blob":
        centers = [np.array([-scene.blob_offset, 0.0, 0.0]), np.array([scene.blob_offset, 0.0, 0.0])]
        hits = np.stack([_sphere_hit(origin, dirs, c, scene.blob_radius) for c in centers])
        label = np.argmin(hits, axis=0)
        distance = np.min(hits, axis=0)
    else:
        dz = dirs[..., 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (scene.plane_z - origin[2]) / dz
        distance = np.where(np.isfinite(s) & (s > 0), s, np.inf)
        label = np.zeros(distance.shape, dtype=int)
        centers = []

    hit = np.isfinite(distance)
    travel = np.where(hit, distance, 0.0)
    points = origin + dirs * travel[..., None]

    channels = [
        fractal_noise(points, scene.seed * 3 + c, scene.octaves, scene.base_frequency)
        for c in range(3)
    ]
    texture = np.stack(channels, axis=-1)
    if scene.kind == "two_tone_blob":
        hue = np.where((label == 0)[..., None], BLOB_HUES[0], BLOB_HUES[1])
        albedo = hue * (0.55 + 0.45 * texture.mean(axis=-1, keepdims=True))
    else:
        albedo = 0.15 + 0.7 * texture

    if scene.shading:
        if centers:
            center = np.stack(centers)[label]
            normals = points - center
            normals /= np.maximum(np.linalg.norm(normals, axis=-1, keepdims=True), 1e-12)
        else:
            normals = np.broadcast_to(np.array([0.0, 0.0, 1.0]), points.shape)
        lambert = np.clip(normals @ LIGHT_DIRECTION, 0.0, 1.0)
        albedo = albedo * (0.35 + 0.65 * lambert)[..., None]

    image = np.where(hit[..., None], albedo, np.asarray(scene.background))
    depth = np.where(hit, travel / z_scale, 0.0)
    return np.clip(np.transpose(image, (2, 0, 1)), 0.0, 1.0), depth
