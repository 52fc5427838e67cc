"""Rendering from a trained state with only a primary pose"""

from __future__ import annotations

import numpy as np

from ..engine import Tensor, no_grad
from ..geometry import CameraPose
from ..rendering import RenderedView, render_view
from .state import TrainState, render_options


def map_latents(state: TrainState, z: np.ndarray) -> np.ndarray:
    """z [B, z_dim] or [z_dim] -> w of the same leading shape"""
    with no_grad():
        return state.mapping(z).data.copy()


def latent_for_seed(state: TrainState, seed: int) -> np.ndarray:
    """The z a CLI seed stands for"""
    return np.random.default_rng(seed).standard_normal(state.config.z_dim)


def render_primary(state: TrainState, w: np.ndarray, pose: CameraPose,
                   want_feature: bool = False) -> RenderedView:
    """Deterministic (midpoint-sampled) render at the base resolution"""
    options = render_options(state.config, want_feature=want_feature).model_copy(
        update={"stratified": False}
    )
    with no_grad():
        return render_view(state.field, Tensor(w), pose, state.intrinsics(), options)


def render_image(state: TrainState, w: np.ndarray, pose: CameraPose,
                 w_decoder: np.ndarray | None = None) -> np.ndarray:
    """
    Final image of the generator for one pose

    Until a stage 2 step has run this is the volume-rendered color; after
    that the composited feature map is decoded at the resolution and fade
    coefficient of the last completed step.

    Args:
        state: Trained state
        w: Style vector fed to the radiance field
        pose: Camera pose
        w_decoder: Style vector fed to the decoder; defaults to w

    Returns:
        Image [3, H, W] in [0, 1]
    """
    phase = state.trained_phase
    if phase.stage == 1:
        return render_primary(state, w, pose).color.data.astype(np.float64)
    view = render_primary(state, w, pose, want_feature=True)
    style = w if w_decoder is None else w_decoder
    with no_grad():
        decoded = state.decoder(
            view.feature.reshape(1, *view.feature.shape), Tensor(style), phase.resolution,
            phase.fade_alpha,
        )
    image = (decoded.data[0].astype(np.float64) + 1.0) / 2.0
    return np.clip(image, 0.0, 1.0)
