"""Data validation utilities"""

import numpy as np

from .exceptions import DataValidationError


class DataValidator:
    """Validate decoded image batches"""

    @staticmethod
    def validate_image_batch(batch: np.ndarray, resolution: int | None = None) -> None:
        """
        Validate a batch of channel-first RGB images

        Args:
            batch: Array [B, 3, H, W] expected in [0, 1]
            resolution: Expected square size, if any

        Raises:
            DataValidationError: If validation fails
        """
        batch = np.asarray(batch)
        if batch.ndim != 4 or batch.shape[1] != 3:
            raise DataValidationError(f"expected [B, 3, H, W] images, got shape {batch.shape}")

        if batch.shape[0] == 0:
            raise DataValidationError("image batch is empty")

        if resolution is not None and batch.shape[2:] != (resolution, resolution):
            raise DataValidationError(
                f"expected {resolution}x{resolution} images, got {batch.shape[2]}x{batch.shape[3]}"
            )

        if not np.all(np.isfinite(batch)):
            raise DataValidationError("image batch contains NaN or infinite values")

        if batch.min() < 0.0 or batch.max() > 1.0:
            raise DataValidationError(
                f"image values must lie in [0, 1], got [{batch.min():.4f}, {batch.max():.4f}]"
            )
