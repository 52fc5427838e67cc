"""Image- and feature-level re-projection losses"""

from __future__ import annotations

import numpy as np

from ..engine import Tensor, as_tensor, avg_pool2d, box_filter3x3
from ..engine.exceptions import ShapeError

SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2
SSIM_WEIGHT = 0.85
MRF_BANDWIDTH = 0.5
MRF_EPS = 1e-5
MRF_MAX_SIDE = 32


def ssim(a: Tensor | np.ndarray, b: Tensor | np.ndarray) -> Tensor:
    """
    Per-pixel structural similarity with 3x3 mean-filter statistics

    Args:
        a: Images [..., C, H, W] in [0, 1]
        b: Images of the same shape

    Returns:
        SSIM map of the input shape, in [-1, 1]
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError(f"ssim needs equal shapes, got {a.shape} and {b.shape}")
    mu_a, mu_b = box_filter3x3(a), box_filter3x3(b)
    var_a = box_filter3x3(a * a) - mu_a * mu_a
    var_b = box_filter3x3(b * b) - mu_b * mu_b
    cov = box_filter3x3(a * b) - mu_a * mu_b
    numerator = (mu_a * mu_b * 2.0 + SSIM_C1) * (cov * 2.0 + SSIM_C2)
    denominator = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return (numerator / denominator).clamp(-1.0, 1.0)


def _masked_mean(per_pixel: Tensor, valid: np.ndarray) -> Tensor:
    mask = np.broadcast_to(np.asarray(valid, dtype=np.float64), per_pixel.shape)
    return (per_pixel * mask).sum() / float(mask.sum())


def image_reproj_loss(
    i_pri: Tensor | np.ndarray,
    i_warp: Tensor | np.ndarray,
    valid: np.ndarray,
    mu: float = SSIM_WEIGHT,
) -> Tensor:
    """
    Photometric re-projection loss, (1 - mu) L1 + (mu / 2)(1 - SSIM)

    Both terms are averaged over channels and then over valid pixels.

    Args:
        i_pri: Primary images [..., C, H, W]
        i_warp: Warped auxiliary images, same shape
        valid: Pixel mask [..., H, W]
        mu: SSIM weight

    Returns:
        Scalar loss; 0 (with a printed warning) when no pixel is valid
    """
    i_pri, i_warp = as_tensor(i_pri), as_tensor(i_warp)
    if i_pri.shape != i_warp.shape:
        raise ShapeError(f"re-projection needs equal shapes, got {i_pri.shape} and {i_warp.shape}")
    valid = np.asarray(valid, dtype=bool)
    if not valid.any():
        print("Warning: re-projection mask is empty; loss set to 0")
        return Tensor(0.0)
    l1 = (i_pri - i_warp).abs().mean(axis=-3)
    loss = _masked_mean(l1, valid) * (1.0 - mu)
    if mu > 0:
        dissimilarity = (1.0 - ssim(i_pri, i_warp)).mean(axis=-3)
        loss = loss + _masked_mean(dissimilarity, valid) * (mu / 2.0)
    return loss


def _pool_to(features: Tensor, valid: np.ndarray, max_side: int) -> tuple[Tensor, np.ndarray]:
    while features.shape[-1] > max_side or features.shape[-2] > max_side:
        features = avg_pool2d(features, 2)
        h, w = valid.shape
        valid = valid.reshape(h // 2, 2, w // 2, 2).all(axis=(1, 3))
    return features, valid


def _unit_columns(x: Tensor) -> Tensor:
    return x / ((x * x).sum(axis=0, keepdims=True) + 1e-12).sqrt()


def mrf_loss(
    f_pri: Tensor | np.ndarray,
    f_warp: Tensor | np.ndarray,
    valid: np.ndarray,
    bandwidth: float = MRF_BANDWIDTH,
    eps: float = MRF_EPS,
) -> Tensor:
    """
    Relative-similarity MRF loss between primary and warped feature maps

    Every valid location is a patch; each warped patch is matched against all
    primary patches by cosine similarity, normalized by its best match.

    Args:
        f_pri: Primary features [C, h, w] or [B, C, h, w]
        f_warp: Warped features, same shape
        valid: Mask [h, w] or [B, h, w]
        bandwidth: Relative-similarity bandwidth
        eps: Stabilizer of the best-match normalization

    Returns:
        Scalar loss (batch mean)

    Raises:
        ValueError: If fewer than two locations are valid
    """
    f_pri, f_warp = as_tensor(f_pri), as_tensor(f_warp)
    if f_pri.shape != f_warp.shape:
        raise ShapeError(f"mrf_loss needs equal shapes, got {f_pri.shape} and {f_warp.shape}")
    valid = np.asarray(valid, dtype=bool)
    if f_pri.ndim == 4:
        losses = [mrf_loss(f_pri[i], f_warp[i], valid[i], bandwidth, eps)
                  for i in range(f_pri.shape[0])]
        total = losses[0]
        for term in losses[1:]:
            total = total + term
        return total / float(len(losses))

    f_pri, valid_pooled = _pool_to(f_pri, valid, MRF_MAX_SIDE)
    f_warp, _ = _pool_to(f_warp, valid, MRF_MAX_SIDE)
    index = np.flatnonzero(valid_pooled)
    if index.size < 2:
        raise ValueError(f"mrf_loss needs at least 2 valid locations, got {index.size}")
    channels = f_pri.shape[0]
    pri = _unit_columns(f_pri.reshape(channels, -1)[:, index])
    warp = _unit_columns(f_warp.reshape(channels, -1)[:, index])
    sim = warp.transpose() @ pri  # [warp patch v, primary patch s]
    best = sim.max(axis=1, keepdims=True)
    relative = ((sim / (best + eps) - 1.0) * (1.0 / bandwidth)).exp()
    normalized = relative / relative.sum(axis=1, keepdims=True)
    return -(normalized.max(axis=1).mean().log())
