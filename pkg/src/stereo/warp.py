"""Depth-based stereo correspondence, inverse warping and mixup"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..engine import Tensor, as_tensor, bilinear_sample, stack
from ..engine.exceptions import ShapeError
from ..geometry import Intrinsics, RigidTransform, pixel_centers, project, unproject

MIN_PROJECTED_DEPTH = 1e-6


@dataclass
class CorrespondenceField:
    """
    Where each primary pixel lands in the auxiliary image

    coords are continuous (x, y) positions in the pixel-center convention
    used for ray generation, so the center of pixel (0, 0) is (0.5, 0.5).
    """

    coords: Tensor  # [H, W, 2]
    valid: np.ndarray  # [H, W] bool
    aux_depth: Tensor  # [H, W], depth of the landing point in the auxiliary camera

    @property
    def valid_fraction(self) -> float:
        return float(self.valid.mean())


def compute_correspondence(
    depth_pri: Tensor | np.ndarray, K: Intrinsics, T_rel: RigidTransform
) -> CorrespondenceField:
    """
    Back-project primary pixels by depth, move them into the auxiliary camera
    and project them again

    Args:
        depth_pri: Primary axis depth [H, W]
        K: Intrinsics shared by both views
        T_rel: Primary-to-auxiliary camera transform

    Returns:
        CorrespondenceField, differentiable with respect to depth_pri
    """
    depth_pri = as_tensor(depth_pri)
    if depth_pri.shape != (K.height, K.width):
        raise ShapeError(f"depth {depth_pri.shape} does not match intrinsics {K.height}x{K.width}")
    u, v = pixel_centers(K)
    points = unproject(u, v, depth_pri, K)
    moved = points @ T_rel.R.T + T_rel.t
    u_aux, v_aux, z_aux, in_front = project(moved, K)
    valid = (
        in_front
        & (z_aux.data > MIN_PROJECTED_DEPTH)
        & (u_aux.data >= 0) & (u_aux.data <= K.width)
        & (v_aux.data >= 0) & (v_aux.data <= K.height)
    )
    return CorrespondenceField(coords=stack([u_aux, v_aux], axis=-1), valid=valid, aux_depth=z_aux)


def inverse_warp(src: Tensor | np.ndarray, corr: CorrespondenceField) -> tuple[Tensor, np.ndarray]:
    """
    Pull auxiliary values back onto the primary pixel grid

    Args:
        src: Auxiliary buffer [C, H, W] (image or feature map)
        corr: Correspondence from the primary view

    Returns:
        (warped [C, H, W], valid [H, W]); gradients reach both src and the
        correspondence coordinates
    """
    src = as_tensor(src)
    if src.shape[-2:] != corr.coords.shape[:2]:
        raise ShapeError(
            f"source resolution {src.shape[-2:]} differs from correspondence {corr.coords.shape[:2]}"
        )
    warped = bilinear_sample(src, corr.coords - 0.5)
    return warped, corr.valid


def stereo_mixup(a: Tensor | np.ndarray, b: Tensor | np.ndarray,
                 eta: float | np.ndarray) -> Tensor:
    """
    Convex combination eta * a + (1 - eta) * b

    Args:
        a: Primary buffer
        b: Warped buffer of the same shape
        eta: Scalar, or one value per leading batch entry

    Raises:
        ShapeError: If a and b differ in shape
        ValueError: If eta leaves [0, 1]
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError(f"mixup needs equal shapes, got {a.shape} and {b.shape}")
    eta_arr = np.asarray(eta, dtype=np.float64)
    if np.any(eta_arr < 0) or np.any(eta_arr > 1):
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    if eta_arr.ndim == 1:
        eta_arr = eta_arr.reshape((-1,) + (1,) * (a.ndim - 1))
    return a * eta_arr + b * (1.0 - eta_arr)
