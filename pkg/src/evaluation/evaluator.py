"""Evaluator combining consistency, collapse and runtime figures"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np

from ..geometry import CameraPose
from ..training import TrainState, latent_for_seed, load_checkpoint, map_latents, render_image
from .consistency import collapse_check, reprojection_error
from .performance_metrics import PerformanceMetrics
from .statistical_analysis import StatisticalAnalyzer


def yaw_sweep(n_views: int, yaw_range: float, radius: float = 1.0) -> list[CameraPose]:
    """n_views poses linearly spaced over [-yaw_range/2, yaw_range/2] at pitch 0"""
    if n_views < 1:
        raise ValueError(f"n_views must be at least 1, got {n_views}")
    yaws = [0.0] if n_views == 1 else np.linspace(-yaw_range / 2, yaw_range / 2, n_views)
    return [CameraPose(pitch=0.0, yaw=float(y), radius=radius) for y in yaws]


class RunEvaluator:
    """Evaluate trained states and compare runs"""

    def __init__(self, n_pairs: int = 64, yaw_gap: float = 0.3, seed: int = 0,
                 sweep_views: int = 35, sweep_range: float = 0.7):
        self.n_pairs = n_pairs
        self.yaw_gap = yaw_gap
        self.seed = seed
        self.sweep_views = sweep_views
        self.sweep_range = sweep_range

    def evaluate_state(self, state: TrainState) -> dict[str, Any]:
        """
        Re-projection error plus a collapse check over a yaw sweep

        Returns:
            Dictionary with 'reprojection', 'collapse' and 'performance'
        """
        reprojection, elapsed = PerformanceMetrics.measure_runtime(
            reprojection_error, state, self.n_pairs, self.yaw_gap, self.seed
        )
        w = map_latents(state, latent_for_seed(state, self.seed))
        views = [
            render_image(state, w, pose)
            for pose in yaw_sweep(self.sweep_views, self.sweep_range, state.config.radius)
        ]
        collapse = collapse_check(views)
        return {
            "reprojection": reprojection,
            "collapse": collapse,
            "performance": {
                "evaluation_seconds": elapsed,
                **PerformanceMetrics.get_memory_usage(),
                **PerformanceMetrics.get_system_info(),
            },
        }

    def evaluate_checkpoint(self, path: str | Path) -> dict[str, Any]:
        state = load_checkpoint(path, with_dataset=False)
        evaluation = self.evaluate_state(state)
        evaluation["checkpoint"] = str(path)
        return evaluation

    @staticmethod
    def compare(evaluation_a: dict[str, Any], evaluation_b: dict[str, Any],
                name_a: str = "full", name_b: str = "ablation") -> dict[str, Any]:
        """Ratio and tests between the per-pair errors of two evaluations"""
        return StatisticalAnalyzer.compare_runs(
            evaluation_a["reprojection"]["errors"],
            evaluation_b["reprojection"]["errors"],
            name_a,
            name_b,
        )

    @staticmethod
    def improvement(initial: dict[str, Any], trained: dict[str, Any]) -> float:
        """Relative drop of the mean re-projection error, 0.5 means halved"""
        before = initial["reprojection"].get("mean")
        after = trained["reprojection"].get("mean")
        if not before:
            return 0.0
        return 1.0 - after / before
