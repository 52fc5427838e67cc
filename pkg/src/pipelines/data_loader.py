"""Training image sources: synthetic scenes or a folder of PNG files"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np

from ..geometry import PoseDistribution, intrinsics_from_fov, sample_pose
from .data_validator import DataValidator
from .exceptions import DataValidationError, EmptyDatasetError
from .image_io import load_png
from .scene_synth import SyntheticScene, render_ground_truth


class DatasetHandle:
    """
    Finite image collection iterated in seeded random order

    Every yielded image is [3, resolution, resolution] linear RGB in [0, 1].
    Epoch order is a permutation drawn from the handle's own generator, so
    the iteration position can be checkpointed and restored.
    """

    def __init__(self, source: str, resolution: int, order_seed: int = 0):
        self.source = source
        self.resolution = resolution
        self.order_seed = order_seed
        self._rng = np.random.default_rng(order_seed)
        self._order: np.ndarray | None = None
        self._cursor = 0
        self.epoch = 0

    def __len__(self) -> int:
        raise NotImplementedError

    def get_image(self, index: int) -> np.ndarray:
        raise NotImplementedError

    def _new_epoch(self, rng: np.random.Generator | None) -> None:
        self._order = (rng or self._rng).permutation(len(self))
        self._cursor = 0
        self.epoch += 1

    def next_indices(self, batch_size: int, rng: np.random.Generator | None = None) -> list[int]:
        if batch_size < 1:
            raise ValueError(f"batch_size must be at least 1, got {batch_size}")
        indices: list[int] = []
        while len(indices) < batch_size:
            if self._order is None or self._cursor >= len(self._order):
                self._new_epoch(rng)
            take = min(batch_size - len(indices), len(self._order) - self._cursor)
            indices.extend(int(i) for i in self._order[self._cursor : self._cursor + take])
            self._cursor += take
        return indices

    def next_batch(self, batch_size: int, rng: np.random.Generator | None = None) -> np.ndarray:
        """
        Next images in epoch order

        Args:
            batch_size: Number of images
            rng: Optional generator for new epoch permutations; defaults to
                the handle's own

        Returns:
            Array [batch_size, 3, resolution, resolution]
        """
        return np.stack([self.get_image(i) for i in self.next_indices(batch_size, rng)])

    def state_dict(self) -> dict[str, Any]:
        return {
            "cursor": self._cursor,
            "epoch": self.epoch,
            "order": None if self._order is None else self._order.tolist(),
            "rng": self._rng.bit_generator.state,
        }

    def load_state_dict(self, state: dict[str, Any]) -> None:
        self._cursor = int(state["cursor"])
        self.epoch = int(state["epoch"])
        self._order = None if state["order"] is None else np.asarray(state["order"], dtype=np.int64)
        self._rng.bit_generator.state = state["rng"]


class SyntheticDataset(DatasetHandle):
    """Ground-truth renders of one scene kind under sampled poses"""

    def __init__(
        self,
        scene: SyntheticScene,
        count: int,
        resolution: int,
        pose_dist: PoseDistribution,
        fov_deg: float = 12.0,
        order_seed: int = 0,
    ):
        super().__init__("synthetic", resolution, order_seed)
        if count < 1:
            raise EmptyDatasetError(f"synthetic dataset needs count >= 1, got {count}")
        self.scene = scene
        self.count = count
        self.pose_dist = pose_dist
        self.K = intrinsics_from_fov(fov_deg, resolution)
        self._cache: dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return self.count

    def get_image(self, index: int) -> np.ndarray:
        if index not in self._cache:
            pose = sample_pose(self.pose_dist, np.random.default_rng([self.scene.seed, index]))
            scene = self.scene.model_copy(update={"seed": self.scene.seed + index})
            image, _ = render_ground_truth(scene, pose, self.K)
            self._cache[index] = image
        return self._cache[index]


class FolderDataset(DatasetHandle):
    """Flat directory of .png files, decoded once and resized to resolution"""

    def __init__(self, folder: str | Path, resolution: int, order_seed: int = 0):
        super().__init__("folder", resolution, order_seed)
        self.folder = Path(folder)
        if not self.folder.is_dir():
            raise EmptyDatasetError(f"image folder not found: {self.folder}")
        self.images: list[np.ndarray] = []
        self.files: list[Path] = []
        for path in sorted(self.folder.glob("*.png")):
            try:
                image = load_png(path, resolution)
            except Exception as e:
                print(f"Warning: skipping unreadable image {path}: {e}")
                continue
            try:
                DataValidator.validate_image_batch(image[None], resolution)
            except DataValidationError as e:
                raise DataValidationError(f"{path}: {e}") from e
            self.images.append(image)
            self.files.append(path)
        if not self.images:
            raise EmptyDatasetError(f"no readable .png images in {self.folder}")

    def __len__(self) -> int:
        return len(self.images)

    def get_image(self, index: int) -> np.ndarray:
        return self.images[index]


def next_batch(handle: DatasetHandle, batch_size: int,
               rng: np.random.Generator | None = None) -> np.ndarray:
    """Functional form of DatasetHandle.next_batch"""
    return handle.next_batch(batch_size, rng)
