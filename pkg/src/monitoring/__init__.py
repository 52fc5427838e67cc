"""Monitoring utilities for metrics export and tracing"""

from .metrics import (
    TrainingMetricsCollector,
    record_flow_metrics,
    record_nonfinite_abort,
    record_training_step,
)
from .tracing import get_tracer, setup_tracing, traced

__all__ = [
    "TrainingMetricsCollector",
    "record_flow_metrics",
    "record_nonfinite_abort",
    "record_training_step",
    "setup_tracing",
    "get_tracer",
    "traced",
]
