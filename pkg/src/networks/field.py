"""Style-conditioned sinusoidal radiance field"""

from __future__ import annotations

import numpy as np

from ..engine import NonFiniteError, Tensor, as_tensor, concat
from .module import Linear, Module

FIRST_FREQUENCY = 30.0
HIDDEN_FREQUENCY = 15.0
# scene half-extent mapped to roughly unit coordinates before the first layer
COORDINATE_SCALE = 0.48


def positional_encoding(x: Tensor | np.ndarray, n_freqs: int) -> Tensor:
    """
    Classic sin/cos frequency encoding

    Args:
        x: Input of shape [..., D]
        n_freqs: Number of octaves L; 0 returns x unchanged

    Returns:
        [..., D * 2L] tensor, or x itself when n_freqs is 0
    """
    x = as_tensor(x)
    if n_freqs == 0:
        return x
    bands = []
    for k in range(n_freqs):
        scaled = x * float(2.0**k * np.pi)
        bands.extend([scaled.sin(), scaled.cos()])
    return concat(bands, axis=-1)


class FiLMSiren(Module):
    """sin(gamma * (W h + b) + beta) with gamma, beta affine in w"""

    def __init__(self, in_features: int, out_features: int, w_dim: int,
                 rng: np.random.Generator, frequency: float, first: bool = False):
        super().__init__()
        self.frequency = frequency
        if first:
            self.linear = self.add_module(
                "linear", Linear(in_features, out_features, rng, bound=1.0 / in_features, bias_init=0.0)
            )
        else:
            bound = np.sqrt(6.0 / in_features) / frequency
            self.linear = self.add_module("linear", Linear(in_features, out_features, rng, bound=bound))
        small = 0.25 / np.sqrt(w_dim)
        self.film_gamma = self.add_module(
            "film_gamma", Linear(w_dim, out_features, rng, bound=small, bias_init=0.0)
        )
        self.film_beta = self.add_module(
            "film_beta", Linear(w_dim, out_features, rng, bound=small, bias_init=0.0)
        )

    def preactivation(self, h: Tensor, w: Tensor) -> Tensor:
        if w.ndim == 1:
            w = w.reshape(1, -1)
        gamma = (self.film_gamma(w) + 1.0) * self.frequency
        beta = self.film_beta(w)
        return self.linear(h) * gamma + beta

    def forward(self, h: Tensor, w: Tensor) -> Tensor:
        return self.preactivation(h, w).sin()


class RadianceField(Module):
    """
    Eight FiLM-conditioned sine layers with density, feature and color heads

    The feature head sees the trunk output (plus the view direction when
    enabled); the color head maps that feature to RGB, so the feature is the
    activation right before the final layer.
    """

    def __init__(
        self,
        rng: np.random.Generator,
        w_dim: int = 256,
        width: int = 256,
        n_layers: int = 8,
        feature_dim: int = 256,
        use_view_dirs: bool = True,
        pe_position: int = 0,
        pe_direction: int = 0,
        density_bias: float = 10.0,
    ):
        super().__init__()
        self.width = width
        self.feature_dim = feature_dim
        self.use_view_dirs = use_view_dirs
        self.pe_position = pe_position
        self.pe_direction = pe_direction
        in_x = 3 if pe_position == 0 else 6 * pe_position
        in_d = 3 if pe_direction == 0 else 6 * pe_direction
        self.layers = [
            self.add_module(
                f"layer{i}",
                FiLMSiren(
                    in_x if i == 0 else width, width, w_dim, rng,
                    frequency=FIRST_FREQUENCY if i == 0 else HIDDEN_FREQUENCY,
                    first=i == 0,
                ),
            )
            for i in range(n_layers)
        ]
        self.density_head = self.add_module(
            "density_head",
            Linear(width, 1, rng, bound=np.sqrt(6.0 / width) / HIDDEN_FREQUENCY,
                   bias_init=density_bias),
        )
        head_in = width + (in_d if use_view_dirs else 0)
        self.feature_head = self.add_module(
            "feature_head", FiLMSiren(head_in, feature_dim, w_dim, rng, HIDDEN_FREQUENCY)
        )
        self.color_head = self.add_module(
            "color_head", Linear(feature_dim, 3, rng, bound=np.sqrt(6.0 / feature_dim))
        )

    def trunk(self, x: Tensor, w: Tensor, trace: list[np.ndarray] | None = None) -> Tensor:
        w = as_tensor(w)
        h = positional_encoding(as_tensor(x) * (1.0 / COORDINATE_SCALE), self.pe_position)
        for layer in self.layers:
            pre = layer.preactivation(h, w)
            if trace is not None:
                trace.append(pre.data)
            h = pre.sin()
        return h

    def forward(
        self, x: Tensor | np.ndarray, d: Tensor | np.ndarray, w: Tensor
    ) -> tuple[Tensor, Tensor, Tensor]:
        """
        Evaluate the field at sample points

        Args:
            x: World positions [..., 3]
            d: Unit view directions [..., 3]
            w: Style vector [w_dim]

        Returns:
            (color [..., 3] in [0, 1], sigma [..., 1] >= 0, feature [..., feature_dim])

        Raises:
            NonFiniteError: If a position, direction or style entry is NaN or infinite
        """
        x, d, w = as_tensor(x), as_tensor(d), as_tensor(w)
        for name, value in (("positions", x), ("directions", d), ("style", w)):
            if not np.all(np.isfinite(value.data)):
                raise NonFiniteError(f"radiance field {name} must be finite")
        h = self.trunk(x, w)
        sigma = self.density_head(h).softplus()
        if self.use_view_dirs:
            h = concat([h, positional_encoding(d, self.pe_direction)], axis=-1)
        feature = self.feature_head(h, w)
        color = self.color_head(feature).sigmoid()
        return color, sigma, feature
