"""Shared fixtures: finite-difference gradient checks and a tiny training config"""

from collections.abc import Callable

import numpy as np
import pytest

from src.config import TrainConfig, build_config
from src.engine import Tensor, no_grad, precision
from src.training import TrainState, build_state

# every network kept as small as the schedule allows
TINY_CONFIG = {
    "profile": "desk",
    "seed": 0,
    "stage1_steps": 3,
    "stage2_steps_per_resolution": 3,
    "fade_steps": 2,
    "resolutions": [8, 16],
    "batch_size": 2,
    "samples_per_ray": 6,
    "z_dim": 8,
    "w_dim": 8,
    "field_width": 16,
    "field_layers": 2,
    "feature_dim": 8,
    "decoder_channels": {8: 8, 16: 4},
    "disc_channels": {8: 8, 16: 4},
    "scene": {"count": 4},
    "checkpoint_every": 2,
}


def check_gradient(
    fn: Callable[..., Tensor],
    *arrays: np.ndarray,
    eps: float = 1e-6,
    atol: float = 1e-6,
    rtol: float = 1e-4,
    seed: int = 0,
) -> None:
    """
    Compare engine gradients of fn against central differences in float64

    fn may return any shape; its output is contracted with fixed random
    weights so every output element contributes to the checked scalar.
    """
    arrays = tuple(np.asarray(a, dtype=np.float64) for a in arrays)
    with precision("float64"):
        with no_grad():
            shape = fn(*(Tensor(a) for a in arrays)).shape
        weights = np.random.default_rng(seed).standard_normal(shape)

        def scalar(*values: np.ndarray) -> float:
            with no_grad():
                return float((fn(*(Tensor(v) for v in values)) * weights).sum().item())

        leaves = [Tensor(a.copy(), requires_grad=True) for a in arrays]
        (fn(*leaves) * weights).sum().backward()

        for i, (leaf, base) in enumerate(zip(leaves, arrays)):
            analytic = np.zeros_like(base) if leaf.grad is None else leaf.grad
            numeric = np.zeros_like(base)
            for index in np.ndindex(base.shape):
                plus = [a.copy() for a in arrays]
                minus = [a.copy() for a in arrays]
                plus[i][index] += eps
                minus[i][index] -= eps
                numeric[index] = (scalar(*plus) - scalar(*minus)) / (2 * eps)
            np.testing.assert_allclose(analytic, numeric, atol=atol, rtol=rtol,
                                       err_msg=f"gradient of input {i}")


@pytest.fixture
def gradcheck():
    """Central-difference gradient checker"""
    return check_gradient


@pytest.fixture
def rng():
    """Seeded generator"""
    return np.random.default_rng(0)


@pytest.fixture
def tiny_config(tmp_path) -> TrainConfig:
    """Two-resolution config small enough to train in seconds"""
    return build_config({**TINY_CONFIG, "output_dir": str(tmp_path / "run")})


@pytest.fixture
def tiny_state(tiny_config) -> TrainState:
    """Fresh training state at step 0"""
    return build_state(tiny_config)
