"""PNG input/output, color transfer and small image utilities"""

from __future__ import annotations

from pathlib import Path

import imageio.v3 as iio
import numpy as np
from matplotlib import colormaps
from PIL import Image


def srgb_to_linear(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return np.where(x <= 0.04045, x / 12.92, ((x + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return np.where(x <= 0.0031308, x * 12.92, 1.055 * np.power(x, 1.0 / 2.4) - 0.055)


def to_uint8(image: np.ndarray, linear: bool = True) -> np.ndarray:
    """[3, H, W] float image in [0, 1] -> [H, W, 3] uint8"""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        image = np.repeat(image[None], 3, axis=0)
    encoded = linear_to_srgb(image) if linear else np.clip(image, 0.0, 1.0)
    return np.round(np.transpose(encoded, (1, 2, 0)) * 255.0).astype(np.uint8)


def save_png(path: str | Path, image: np.ndarray, linear: bool = True) -> Path:
    """
    Write a channel-first float image as 8-bit RGB PNG

    Args:
        path: Output path
        image: [3, H, W] (or [H, W]) values in [0, 1]
        linear: Encode from linear light to sRGB; False writes values as-is

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    iio.imwrite(path, to_uint8(image, linear))
    return path


def load_png(path: str | Path, resolution: int | None = None) -> np.ndarray:
    """
    Read an image file into linear-light [3, H, W] floats

    Grayscale images are replicated over channels and alpha is dropped.

    Args:
        path: Image file
        resolution: Optional square size to resize to (box filter)
    """
    pixels = np.asarray(iio.imread(path))
    if pixels.ndim == 2:
        pixels = np.stack([pixels] * 3, axis=-1)
    pixels = pixels[..., :3]
    if pixels.dtype != np.uint8:
        pixels = np.clip(pixels / max(float(pixels.max()), 1.0) * 255.0, 0, 255).astype(np.uint8)
    if resolution is not None and pixels.shape[:2] != (resolution, resolution):
        pixels = np.asarray(
            Image.fromarray(pixels).resize((resolution, resolution), Image.Resampling.BOX)
        )
    return srgb_to_linear(np.transpose(pixels, (2, 0, 1)).astype(np.float64) / 255.0)


def area_downsample(images: np.ndarray, resolution: int) -> np.ndarray:
    """Average-pool [..., H, W] images down to resolution x resolution"""
    height, width = images.shape[-2:]
    if height == resolution and width == resolution:
        return images
    if height % resolution or width % resolution:
        raise ValueError(f"cannot area-downsample {height}x{width} to {resolution}")
    fh, fw = height // resolution, width // resolution
    lead = images.shape[:-2]
    blocks = images.reshape(lead + (resolution, fh, resolution, fw))
    return blocks.mean(axis=(-3, -1))


def make_grid(images: list[np.ndarray], per_row: int = 8, pad: int = 2,
              fill: float = 1.0) -> np.ndarray:
    """Tile equally sized [3, H, W] images into rows of per_row"""
    if not images:
        raise ValueError("make_grid needs at least one image")
    channels, height, width = images[0].shape
    rows = (len(images) + per_row - 1) // per_row
    cols = min(per_row, len(images))
    grid = np.full(
        (channels, rows * (height + pad) + pad, cols * (width + pad) + pad), fill, dtype=np.float64
    )
    for i, image in enumerate(images):
        r, c = divmod(i, per_row)
        top, left = pad + r * (height + pad), pad + c * (width + pad)
        grid[:, top : top + height, left : left + width] = image
    return grid


def colorize(values: np.ndarray, cmap: str = "viridis", vmin: float | None = None,
             vmax: float | None = None) -> np.ndarray:
    """Map an [H, W] scalar field to a [3, H, W] display image (already sRGB)"""
    values = np.asarray(values, dtype=np.float64)
    lo = float(values.min()) if vmin is None else vmin
    hi = float(values.max()) if vmax is None else vmax
    scaled = np.zeros_like(values) if hi <= lo else (values - lo) / (hi - lo)
    rgba = colormaps[cmap](np.clip(scaled, 0.0, 1.0))
    return np.transpose(rgba[..., :3], (2, 0, 1))
