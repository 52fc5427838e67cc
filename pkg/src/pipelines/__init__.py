"""Data pipelines: synthetic scenes, image folders, image I/O and validation"""

from .data_loader import DatasetHandle, FolderDataset, SyntheticDataset, next_batch
from .data_validator import DataValidator
from .exceptions import DataValidationError, EmptyDatasetError
from .image_io import (
    area_downsample,
    colorize,
    linear_to_srgb,
    load_png,
    make_grid,
    save_png,
    srgb_to_linear,
)
from .scene_synth import SyntheticScene, fractal_noise, render_ground_truth, value_noise

__all__ = [
    "DataValidationError",
    "DataValidator",
    "DatasetHandle",
    "EmptyDatasetError",
    "FolderDataset",
    "SyntheticDataset",
    "SyntheticScene",
    "area_downsample",
    "colorize",
    "fractal_noise",
    "linear_to_srgb",
    "load_png",
    "make_grid",
    "next_batch",
    "render_ground_truth",
    "save_png",
    "srgb_to_linear",
    "value_noise",
]
