"""Progressive 2D decoder from composited feature maps to RGB"""

from __future__ import annotations

import numpy as np

from ..engine import Tensor, as_tensor, bilinear_upsample
from .exceptions import ResolutionError
from .module import Conv2d, Linear, Module


class AdaIN(Module):
    """Instance normalization re-styled by per-channel scale and shift from w"""

    def __init__(self, w_dim: int, channels: int, rng: np.random.Generator, eps: float = 1e-8):
        super().__init__()
        self.eps = eps
        small = 0.25 / np.sqrt(w_dim)
        self.scale = self.add_module("scale", Linear(w_dim, channels, rng, bound=small, bias_init=1.0))
        self.shift = self.add_module("shift", Linear(w_dim, channels, rng, bound=small, bias_init=0.0))

    def forward(self, x: Tensor, w: Tensor) -> Tensor:
        mean = x.mean(axis=(2, 3), keepdims=True)
        centred = x - mean
        var = (centred * centred).mean(axis=(2, 3), keepdims=True)
        normed = centred / (var + self.eps).sqrt()
        batch, channels = x.shape[0], x.shape[1]
        s = self.scale(w).reshape(-1, channels, 1, 1)
        b = self.shift(w).reshape(-1, channels, 1, 1)
        if s.shape[0] not in (1, batch):
            raise ResolutionError(f"style batch {s.shape[0]} does not match feature batch {batch}")
        return normed * s + b


class DecoderBlock(Module):
    def __init__(self, in_channels: int, out_channels: int, w_dim: int, rng: np.random.Generator):
        super().__init__()
        self.conv = self.add_module("conv", Conv2d(in_channels, out_channels, 3, rng))
        self.adain = self.add_module("adain", AdaIN(w_dim, out_channels, rng))
        self.to_rgb = self.add_module("to_rgb", Conv2d(out_channels, 3, 1, rng))

    def forward(self, x: Tensor, w: Tensor) -> Tensor:
        return self.adain(self.conv(x), w).leaky_relu(0.2)


class ProgressiveDecoder(Module):
    """
    Decoder grown one resolution at a time

    The base block works at the feature-map resolution without upsampling;
    every further block doubles the resolution. RGB outputs of consecutive
    blocks are accumulated through a bilinear skip path before the final tanh.
    """

    def __init__(self, rng: np.random.Generator, in_channels: int, w_dim: int,
                 channels: dict[int, int]):
        super().__init__()
        self.resolutions = sorted(channels)
        for lo, hi in zip(self.resolutions, self.resolutions[1:]):
            if hi != 2 * lo:
                raise ResolutionError(f"decoder resolutions must double, got {self.resolutions}")
        self.base = self.resolutions[0]
        self.blocks: dict[int, DecoderBlock] = {}
        prev = in_channels
        for res in self.resolutions:
            self.blocks[res] = self.add_module(
                f"res{res}", DecoderBlock(prev, channels[res], w_dim, rng)
            )
            prev = channels[res]

    def forward(self, features: Tensor, w: Tensor | np.ndarray, target_res: int,
                fade_alpha: float = 1.0) -> Tensor:
        """
        Decode features to an image at target_res

        Args:
            features: Feature maps [B, C, base, base]
            w: Style vector [w_dim] or per-sample [B, w_dim]
            target_res: Output resolution, one of the grown resolutions
            fade_alpha: Blend between the upsampled previous output (0) and
                the newest block (1)

        Returns:
            Images [B, 3, target_res, target_res] in [-1, 1]

        Raises:
            ResolutionError: If target_res or the feature size is unsupported
        """
        if target_res not in self.blocks:
            raise ResolutionError(f"decoder has no block for {target_res}; grown: {self.resolutions}")
        if features.shape[-1] != self.base or features.shape[-2] != self.base:
            raise ResolutionError(
                f"decoder expects {self.base}x{self.base} features, got {features.shape[-2:]}"
            )
        if not 0.0 <= fade_alpha <= 1.0:
            raise ValueError(f"fade_alpha must be in [0, 1], got {fade_alpha}")
        w = as_tensor(w)
        if w.ndim == 1:
            w = w.reshape(1, -1)

        h, raw = features, None
        for res in self.resolutions:
            block = self.blocks[res]
            h = block(h if res == self.base else bilinear_upsample(h), w)
            rgb = block.to_rgb(h)
            if res == self.base:
                if res == target_res:
                    return rgb.tanh()
                raw = rgb
                continue
            grown = bilinear_upsample(raw) + rgb
            if res == target_res:
                previous = bilinear_upsample(raw.tanh())
                return previous * (1.0 - fade_alpha) + grown.tanh() * fade_alpha
            raw = grown
        raise ResolutionError(f"unreachable target {target_res}")
