"""Prefect workflow for a two-stage training run"""

import time
import uuid
from pathlib import Path
from typing import Any

import mlflow
from prefect import flow, task

from ..config import TrainConfig, build_config, load_config, settings
from ..evaluation import PerformanceMetrics, RunEvaluator
from ..monitoring import record_flow_metrics, setup_tracing, traced
from ..training import Trainer, build_state, load_checkpoint


@task(name="load_config")
def load_config_task(config_path: str, overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    """
    Load and validate a config file

    Returns:
        JSON-safe config snapshot passed on to the other tasks
    """
    return load_config(config_path, overrides).snapshot()


@task(name="train_stage")
def train_stage_task(
    config_data: dict[str, Any],
    stage: int,
    resume: str | None = None,
    output_dir: str | None = None,
) -> dict[str, Any]:
    """
    Train until the end of one stage

    Args:
        config_data: Config snapshot
        stage: 1 stops at the end of stage 1; 2 runs to the end
        resume: Checkpoint to continue from
        output_dir: Run directory (defaults to the config's output_dir)

    Returns:
        Dictionary with the last checkpoint, final loss report and timings
    """
    config = build_config(config_data)
    state = load_checkpoint(resume) if resume else build_state(config)
    until = config.stage1_steps if stage == 1 else None
    trainer = Trainer(state, output_dir)
    start_step = state.step
    report, metrics = PerformanceMetrics.measure_with_resources(trainer.run, until)
    steps = state.step - start_step
    metrics.update(PerformanceMetrics.throughput(steps, metrics["elapsed_time_seconds"]))
    metrics.update(PerformanceMetrics.get_system_info())
    return {
        "checkpoint": str(trainer.checkpoints[-1]) if trainer.checkpoints else resume,
        "step": state.step,
        "report": None if report is None else report.model_dump(),
        "performance": metrics,
        "log_path": str(trainer.log_path),
    }


@task(name="evaluate_consistency")
def evaluate_task(checkpoint: str, n_pairs: int = 64, yaw_gap: float = 0.3,
                  seed: int = 0) -> dict[str, Any]:
    """Re-projection error and collapse check of a checkpoint"""
    with traced("evaluate", checkpoint=checkpoint):
        return RunEvaluator(n_pairs=n_pairs, yaw_gap=yaw_gap, seed=seed).evaluate_checkpoint(
            checkpoint
        )


@task(name="evaluate_initial")
def evaluate_initial_task(config_data: dict[str, Any], n_pairs: int = 64,
                          yaw_gap: float = 0.3, seed: int = 0) -> dict[str, Any]:
    """Same protocol on the untrained generator, the baseline of the improvement"""
    state = build_state(build_config(config_data), with_dataset=False)
    return RunEvaluator(n_pairs=n_pairs, yaw_gap=yaw_gap, seed=seed).evaluate_state(state)


def _scalar_metrics(prefix: str, values: dict[str, Any]) -> dict[str, float]:
    return {
        f"{prefix}{key}": float(value)
        for key, value in values.items()
        if isinstance(value, (int, float)) and not isinstance(value, bool)
    }


@task(name="log_to_mlflow")
def log_to_mlflow_task(
    run_name: str,
    config_data: dict[str, Any],
    training: dict[str, Any],
    evaluation: dict[str, Any] | None,
) -> None:
    """
    Log config, final losses, evaluation and the training log to MLflow
    """
    mlflow.set_tracking_uri(settings.mlflow_tracking_uri)
    mlflow.set_experiment(settings.experiment_name)

    with mlflow.start_run(run_name=run_name):
        params = TrainConfig(**config_data).flat_params()
        mlflow.log_params({k: str(v) for k, v in params.items()})
        report = training.get("report") or {}
        metrics = _scalar_metrics("loss_", report.get("components", {}))
        metrics.update(_scalar_metrics("", training.get("performance", {})))
        if "total" in report:
            metrics["loss_total"] = float(report["total"])
        if evaluation:
            metrics.update(_scalar_metrics("reproj_", evaluation["reprojection"]))
            metrics["collapse_min_std"] = float(evaluation["collapse"]["min_std"])
            mlflow.log_dict(evaluation, "evaluation.json")
        mlflow.log_metrics(metrics)
        log_path = Path(training["log_path"])
        if log_path.exists():
            mlflow.log_artifact(str(log_path))


@flow(name="training_pipeline", log_prints=True)
def training_pipeline(
    config_path: str,
    overrides: dict[str, Any] | None = None,
    resume: str | None = None,
    evaluate: bool = True,
    n_pairs: int = 64,
    yaw_gap: float = 0.3,
    log_mlflow: bool = True,
    run_name: str | None = None,
) -> dict[str, Any]:
    """
    Load config, train stage 1, train stage 2, evaluate, log

    Args:
        config_path: Flat key-value config file
        overrides: Extra config keys (e.g. seed, output_dir)
        resume: Checkpoint to continue from
        evaluate: Run the consistency evaluation on the final checkpoint
        n_pairs: Pose pairs of the evaluation
        yaw_gap: Yaw gap of the evaluation pairs
        log_mlflow: Log the run to MLflow
        run_name: MLflow run name (auto-generated if not provided)

    Returns:
        Dictionary with training and evaluation results
    """
    setup_tracing()
    flow_start_time = time.time()
    run_name = run_name or f"train_{uuid.uuid4().hex[:8]}"

    try:
        config_data = load_config_task(config_path, overrides)
        stage1 = train_stage_task(config_data, 1, resume)
        training = train_stage_task(config_data, 2, stage1["checkpoint"])

        evaluation = None
        if evaluate:
            evaluation = evaluate_task(
                training["checkpoint"], n_pairs, yaw_gap, config_data["seed"]
            )
            initial = evaluate_initial_task(config_data, n_pairs, yaw_gap, config_data["seed"])
            evaluation["improvement"] = RunEvaluator.improvement(initial, evaluation)
            print(
                f"Re-projection error {initial['reprojection'].get('mean')} -> "
                f"{evaluation['reprojection'].get('mean')} "
                f"(improvement {evaluation['improvement']:.1%})"
            )

        if log_mlflow:
            log_to_mlflow_task(run_name, config_data, training, evaluation)

        record_flow_metrics("training_pipeline", time.time() - flow_start_time, True)
        return {
            "run_name": run_name,
            "stage1": stage1,
            "training": training,
            "evaluation": evaluation,
        }
    except Exception:
        record_flow_metrics("training_pipeline", time.time() - flow_start_time, False)
        raise
