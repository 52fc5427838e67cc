"""Evaluation module for consistency, collapse and performance metrics"""

from .consistency import (
    COLLAPSE_STD_THRESHOLD,
    collapse_check,
    pair_error,
    pose_pairs,
    reprojection_error,
)
from .evaluator import RunEvaluator, yaw_sweep
from .performance_metrics import PerformanceMetrics
from .statistical_analysis import StatisticalAnalyzer

__all__ = [
    "COLLAPSE_STD_THRESHOLD",
    "PerformanceMetrics",
    "RunEvaluator",
    "StatisticalAnalyzer",
    "collapse_check",
    "pair_error",
    "pose_pairs",
    "reprojection_error",
    "yaw_sweep",
]
