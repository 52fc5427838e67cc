"""Prefect workflows"""

from .ablation import ablation_config, ablation_flow
from .training_pipeline import training_pipeline

__all__ = [
    "ablation_config",
    "ablation_flow",
    "training_pipeline",
]
