"""Mapping network from Gaussian latents to style vectors"""

import numpy as np

from ..engine import Tensor, as_tensor
from .module import Linear, Module

LATENT_DIM = 256


class MappingNetwork(Module):
    """Four-layer leaky-ReLU MLP, z -> w"""

    def __init__(self, rng: np.random.Generator, z_dim: int = LATENT_DIM,
                 w_dim: int = LATENT_DIM, hidden: int | None = None, n_layers: int = 4):
        super().__init__()
        self.z_dim = z_dim
        self.w_dim = w_dim
        hidden = hidden or w_dim
        sizes = [z_dim] + [hidden] * (n_layers - 1) + [w_dim]
        self.layers = [
            self.add_module(f"layer{i}", Linear(sizes[i], sizes[i + 1], rng))
            for i in range(n_layers)
        ]

    def forward(self, z: Tensor | np.ndarray) -> Tensor:
        """
        Args:
            z: Latent codes of shape [z_dim] or [B, z_dim]

        Returns:
            Style vectors with the same leading shape
        """
        h = as_tensor(z)
        squeeze = h.ndim == 1
        if squeeze:
            h = h.reshape(1, -1)
        for i, layer in enumerate(self.layers):
            h = layer(h)
            if i < len(self.layers) - 1:
                h = h.leaky_relu(0.2)
        return h.reshape(-1) if squeeze else h


def sample_latents(rng: np.random.Generator, n: int, z_dim: int = LATENT_DIM) -> np.ndarray:
    """Draw n standard-normal latent codes"""
    return rng.standard_normal((n, z_dim))
