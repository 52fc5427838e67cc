"""Progressive convolutional discriminator"""

from __future__ import annotations

import numpy as np

from ..engine import Tensor, as_tensor, avg_pool2d
from .exceptions import ResolutionError
from .module import Conv2d, Linear, Module

BASE_DOWNSAMPLES = 3


class BaseTrunk(Module):
    """fromRGB, three (conv, conv, pool) stages, final conv and linear score"""

    def __init__(self, res: int, channels: int, rng: np.random.Generator):
        super().__init__()
        self.from_rgb = self.add_module("from_rgb", Conv2d(3, channels, 1, rng))
        self.convs = [
            self.add_module(f"conv{i}", Conv2d(channels, channels, 3, rng))
            for i in range(2 * BASE_DOWNSAMPLES)
        ]
        self.final_conv = self.add_module("final_conv", Conv2d(channels, channels, 3, rng))
        side = res // 2**BASE_DOWNSAMPLES
        self.linear = self.add_module("linear", Linear(channels * side * side, 1, rng))

    def forward(self, x: Tensor) -> Tensor:
        for i in range(BASE_DOWNSAMPLES):
            x = self.convs[2 * i](x).leaky_relu(0.2)
            x = self.convs[2 * i + 1](x).leaky_relu(0.2)
            x = avg_pool2d(x, 2)
        x = self.final_conv(x).leaky_relu(0.2)
        return self.linear(x.reshape(x.shape[0], -1))


class GrowthBlock(Module):
    """Two convolutions and a 2x downsample added for one resolution doubling"""

    def __init__(self, channels: int, out_channels: int, rng: np.random.Generator):
        super().__init__()
        self.from_rgb = self.add_module("from_rgb", Conv2d(3, channels, 1, rng))
        self.conv0 = self.add_module("conv0", Conv2d(channels, channels, 3, rng))
        self.conv1 = self.add_module("conv1", Conv2d(channels, out_channels, 3, rng))

    def forward(self, x: Tensor) -> Tensor:
        x = self.conv0(x).leaky_relu(0.2)
        x = self.conv1(x).leaky_relu(0.2)
        return avg_pool2d(x, 2)


class ProgressiveDiscriminator(Module):
    """
    Scores images at any grown resolution

    The newest block is faded in against the fromRGB head of the next lower
    resolution applied to the average-pooled image.
    """

    def __init__(self, rng: np.random.Generator, channels: dict[int, int]):
        super().__init__()
        self.resolutions = sorted(channels)
        for lo, hi in zip(self.resolutions, self.resolutions[1:]):
            if hi != 2 * lo:
                raise ResolutionError(
                    f"discriminator resolutions must double, got {self.resolutions}"
                )
        self.base = self.resolutions[0]
        if self.base % 2**BASE_DOWNSAMPLES:
            raise ResolutionError(f"base resolution {self.base} must be divisible by 8")
        self.blocks: dict[int, Module] = {}
        self.blocks[self.base] = self.add_module(
            f"res{self.base}", BaseTrunk(self.base, channels[self.base], rng)
        )
        for res in self.resolutions[1:]:
            self.blocks[res] = self.add_module(
                f"res{res}", GrowthBlock(channels[res], channels[res // 2], rng)
            )

    def n_layers(self, res: int) -> int:
        """Weight layers used at res, fromRGB excluded"""
        grown = self.resolutions.index(res)
        return 2 * BASE_DOWNSAMPLES + 2 + 2 * grown

    def forward(self, img: Tensor | np.ndarray, res: int, fade_alpha: float = 1.0) -> Tensor:
        """
        Args:
            img: Images [B, 3, res, res] in [-1, 1]
            res: Current training resolution
            fade_alpha: Weight of the newest block

        Returns:
            Scores [B, 1]

        Raises:
            ResolutionError: If res is not grown or the images do not match it
        """
        img = as_tensor(img)
        if res not in self.blocks:
            raise ResolutionError(f"discriminator has no block for {res}; grown: {self.resolutions}")
        if img.ndim != 4 or img.shape[-1] != res or img.shape[-2] != res:
            raise ResolutionError(f"expected images of {res}x{res}, got shape {img.shape}")
        if not 0.0 <= fade_alpha <= 1.0:
            raise ValueError(f"fade_alpha must be in [0, 1], got {fade_alpha}")

        if res == self.base:
            return self.blocks[res](self.blocks[res].from_rgb(img).leaky_relu(0.2))

        block = self.blocks[res]
        x = block(block.from_rgb(img).leaky_relu(0.2))
        if fade_alpha < 1.0:
            lower = self.blocks[res // 2]
            skip = lower.from_rgb(avg_pool2d(img, 2)).leaky_relu(0.2)
            x = x * fade_alpha + skip * (1.0 - fade_alpha)
        r = res // 2
        while r > self.base:
            x = self.blocks[r](x)
            r //= 2
        return self.blocks[self.base](x)
