"""Prometheus metrics collection for training runs and workflows"""

from typing import Any
from prometheus_client import Counter, Histogram, Gauge, push_to_gateway
import time

from ..config import settings

# Metrics definitions
training_steps_total = Counter(
    'training_steps_total',
    'Total number of optimization steps run',
    ['stage']
)

training_step_duration_seconds = Histogram(
    'training_step_duration_seconds',
    'Duration of one training iteration in seconds',
    ['stage'],
    buckets=[0.05, 0.1, 0.25, 0.5, 1, 2.5, 5, 10, 30, 60]
)

training_loss = Gauge(
    'training_loss',
    'Latest value of each loss component',
    ['component']
)

training_fade_alpha = Gauge(
    'training_fade_alpha',
    'Current fade-in coefficient of the newest resolution'
)

training_resolution = Gauge(
    'training_resolution',
    'Current training resolution in pixels'
)

nonfinite_aborts_total = Counter(
    'training_nonfinite_aborts_total',
    'Runs aborted by a NaN or infinite loss',
    ['stage']
)

runs_total = Counter(
    'training_runs_total',
    'Total number of training runs',
    ['run_name', 'status']
)

run_duration_seconds = Histogram(
    'training_run_duration_seconds',
    'Training run duration in seconds',
    ['run_name'],
    buckets=[10, 60, 300, 900, 1800, 3600, 7200, 14400, 28800]
)

active_runs = Gauge(
    'active_training_runs',
    'Number of currently running training runs',
    ['run_name']
)

flow_runs_total = Counter(
    'prefect_flow_runs_total',
    'Total number of Prefect flow runs',
    ['flow_name', 'status']
)

flow_run_duration_seconds = Histogram(
    'prefect_flow_run_duration_seconds',
    'Prefect flow run duration in seconds',
    ['flow_name'],
    buckets=[1, 5, 10, 30, 60, 120, 300, 600, 1800, 3600]
)


def push_metrics(job: str) -> None:
    """Push the default registry to the Pushgateway when enabled"""
    if not settings.push_metrics:
        return
    try:
        push_to_gateway(
            settings.pushgateway_url,
            job=job,
            registry=None,  # Use default registry
        )
    except Exception:
        # Silently fail if pushgateway is not available
        pass


class TrainingMetricsCollector:
    """Context manager tracking one training run"""

    def __init__(self, run_name: str):
        self.run_name = run_name
        self.start_time: float | None = None

    def __enter__(self):
        self.start_time = time.time()
        active_runs.labels(run_name=self.run_name).inc()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        duration = time.time() - self.start_time if self.start_time else 0
        active_runs.labels(run_name=self.run_name).dec()

        status = 'success' if exc_type is None else 'failure'
        runs_total.labels(run_name=self.run_name, status=status).inc()
        run_duration_seconds.labels(run_name=self.run_name).observe(duration)

        push_metrics('stereo-gan-training')
        return False  # Don't suppress exceptions


def record_training_step(
    stage: int,
    duration: float,
    components: dict[str, Any],
    fade_alpha: float,
    resolution: int,
) -> None:
    """
    Record metrics of one training iteration

    Args:
        stage: Training stage (1 or 2)
        duration: Iteration duration in seconds
        components: Loss components of the iteration
        fade_alpha: Current fade-in coefficient
        resolution: Current training resolution
    """
    label = str(stage)
    training_steps_total.labels(stage=label).inc()
    training_step_duration_seconds.labels(stage=label).observe(duration)
    for name, value in components.items():
        training_loss.labels(component=name).set(float(value))
    training_fade_alpha.set(fade_alpha)
    training_resolution.set(resolution)


def record_nonfinite_abort(stage: int) -> None:
    """Count a run aborted by a non-finite loss"""
    nonfinite_aborts_total.labels(stage=str(stage)).inc()
    push_metrics('stereo-gan-training')


def record_flow_metrics(
    flow_name: str,
    duration: float,
    success: bool,
) -> None:
    """
    Record Prefect flow metrics

    Args:
        flow_name: Name of the flow
        duration: Flow duration in seconds
        success: Whether flow succeeded
    """
    status = 'success' if success else 'failure'
    flow_runs_total.labels(
        flow_name=flow_name,
        status=status
    ).inc()

    flow_run_duration_seconds.labels(
        flow_name=flow_name
    ).observe(duration)

    push_metrics('stereo-gan-workflows')
