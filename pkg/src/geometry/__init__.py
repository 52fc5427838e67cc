"""Camera geometry: poses, intrinsics, rays and projection"""

from .camera import (
    POSE_PRESETS,
    CameraPose,
    Intrinsics,
    PoseDistribution,
    RigidTransform,
    intrinsics_from_fov,
    pixel_centers,
    pose_from_preset,
    pose_to_extrinsics,
    project,
    relative_transform,
    sample_pose,
    unproject,
)
from .exceptions import GeometryError
from .rays import RayBundle, camera_directions, generate_rays

__all__ = [
    "POSE_PRESETS",
    "CameraPose",
    "GeometryError",
    "Intrinsics",
    "PoseDistribution",
    "RayBundle",
    "RigidTransform",
    "camera_directions",
    "generate_rays",
    "intrinsics_from_fov",
    "pixel_centers",
    "pose_from_preset",
    "pose_to_extrinsics",
    "project",
    "relative_transform",
    "sample_pose",
    "unproject",
]
