"""Alpha compositing of per-sample values along rays"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..engine import Tensor, as_tensor


def composite_weights(sigma: Tensor | np.ndarray, deltas: Tensor | np.ndarray) -> Tensor:
    """
    Per-sample compositing weights

    w_i = T_i (1 - exp(-sigma_i delta_i)) with the exclusive transmittance
    T_i = exp(-sum_{j<i} sigma_j delta_j).

    Args:
        sigma: Densities [..., N], non-negative
        deltas: Segment lengths [..., N], positive

    Returns:
        Weights [..., N]; their sum along the last axis lies in [0, 1]

    Raises:
        ValueError: If any density is negative or any delta is not positive
    """
    sigma, deltas = as_tensor(sigma), as_tensor(deltas)
    if np.any(sigma.data < 0):
        raise ValueError(f"densities must be non-negative, min is {sigma.data.min()}")
    if np.any(deltas.data <= 0):
        raise ValueError(f"deltas must be positive, min is {deltas.data.min()}")
    optical = sigma * deltas
    alpha = 1.0 - (-optical).exp()
    before = optical.cumsum(axis=-1) - optical
    return (-before).exp() * alpha


def composite_depth(weights: Tensor, sample_depths: Tensor | np.ndarray) -> Tensor:
    """Expected depth sum_i w_i d_i (0 on empty rays)"""
    return (weights * sample_depths).sum(axis=-1)


def composite_color(
    weights: Tensor, colors: Tensor | np.ndarray, background: Sequence[float] | None = None
) -> Tensor:
    """
    Composited color sum_i w_i c_i

    Args:
        weights: [..., N]
        colors: [..., N, 3]
        background: Optional RGB added with weight (1 - opacity)

    Returns:
        [..., 3]
    """
    color = (weights.reshape(weights.shape + (1,)) * colors).sum(axis=-2)
    if background is None:
        return color
    opacity = weights.sum(axis=-1, keepdims=True)
    return color + (1.0 - opacity) * np.asarray(background, dtype=np.float64)


def composite_feature(weights: Tensor, features: Tensor | np.ndarray) -> Tensor:
    """Composited feature sum_i w_i f_i for [..., N, F] features"""
    return (weights.reshape(weights.shape + (1,)) * features).sum(axis=-2)
