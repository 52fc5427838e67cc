"""Multi-view consistency and collapse checks of a trained generator"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..geometry import CameraPose, relative_transform, sample_pose
from ..objectives import image_reproj_loss
from ..stereo import compute_correspondence, inverse_warp
from ..stereo.pair import OPACITY_THRESHOLD
from ..training import TrainState, map_latents, render_primary
from .statistical_analysis import StatisticalAnalyzer

COLLAPSE_STD_THRESHOLD = 0.02


def pose_pairs(state: TrainState, n_pairs: int, yaw_gap: float,
               rng: np.random.Generator) -> list[tuple[CameraPose, CameraPose]]:
    """Primary poses from the training distribution, auxiliaries yaw_gap to the side"""
    pairs = []
    for _ in range(n_pairs):
        pri = sample_pose(state.pose_dist, rng)
        aux = CameraPose(pitch=pri.pitch, yaw=pri.yaw + yaw_gap, radius=pri.radius)
        pairs.append((pri, aux))
    return pairs


def pair_error(state: TrainState, w: np.ndarray, pri: CameraPose, aux: CameraPose,
               mu: float | None = None) -> tuple[float, float] | None:
    """
    Masked re-projection loss of one rendered pair

    Returns:
        (loss, valid fraction), or None when no pixel is valid
    """
    primary = render_primary(state, w, pri)
    auxiliary = render_primary(state, w, aux)
    K = state.intrinsics()
    corr = compute_correspondence(primary.depth, K, relative_transform(pri, aux))
    valid = corr.valid & (primary.opacity.data > OPACITY_THRESHOLD)
    if not valid.any():
        return None
    warped, _ = inverse_warp(auxiliary.color, corr)
    loss = image_reproj_loss(
        primary.color, warped, valid, state.config.mu_ssim if mu is None else mu
    )
    return loss.item(), float(valid.mean())


def reprojection_error(state: TrainState, n_pairs: int = 64, yaw_gap: float = 0.3,
                       seed: int = 0) -> dict[str, Any]:
    """
    Masked re-projection loss averaged over fresh pose pairs

    Each pair uses its own latent; the auxiliary camera sits yaw_gap radians
    beside the primary one. Pairs without valid pixels are skipped and
    counted.

    Args:
        state: Trained (or freshly initialized) state
        n_pairs: Number of pose pairs
        yaw_gap: Yaw difference between primary and auxiliary cameras
        seed: Seed of latents and poses; equal seeds give equal pairs

    Returns:
        Summary with mean/median/std, the per-pair errors and skipped count
    """
    if n_pairs < 1:
        raise ValueError(f"n_pairs must be at least 1, got {n_pairs}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_pairs, state.config.z_dim))
    ws = map_latents(state, z)
    errors: list[float] = []
    fractions: list[float] = []
    skipped = 0
    for w, (pri, aux) in zip(ws, pose_pairs(state, n_pairs, yaw_gap, rng)):
        result = pair_error(state, w, pri, aux)
        if result is None:
            skipped += 1
            continue
        errors.append(result[0])
        fractions.append(result[1])
    if not errors:
        print(f"Warning: none of the {n_pairs} pose pairs had valid pixels")
    summary = StatisticalAnalyzer.compute_summary_statistics(errors)
    return {
        **summary,
        "n_pairs": n_pairs,
        "yaw_gap": yaw_gap,
        "seed": seed,
        "skipped": skipped,
        "valid_fraction": float(np.mean(fractions)) if fractions else 0.0,
        "errors": errors,
        "step": state.step,
    }


def collapse_check(images: list[np.ndarray] | np.ndarray,
                   threshold: float = COLLAPSE_STD_THRESHOLD) -> dict[str, Any]:
    """
    Per-view pixel standard deviation of rendered images

    A view counts as collapsed when its std is at or below threshold or it
    contains non-finite values.

    Args:
        images: Views [N, 3, H, W] or a list of [3, H, W]
        threshold: Minimum std of a healthy view

    Returns:
        Dictionary with per-view std, finiteness and the overall verdict
    """
    stds, finite = [], []
    for image in images:
        image = np.asarray(image, dtype=np.float64)
        ok = bool(np.all(np.isfinite(image)))
        finite.append(ok)
        stds.append(float(image.std()) if ok else float("nan"))
    passed = bool(stds) and all(
        ok and std > threshold for ok, std in zip(finite, stds)
    )
    return {
        "per_view_std": stds,
        "all_finite": all(finite),
        "min_std": float(np.nanmin(stds)) if any(finite) else float("nan"),
        "threshold": threshold,
        "passed": passed,
    }
