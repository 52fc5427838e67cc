"""Prefect workflow comparing the full method against the no-consistency ablation"""

import time
from pathlib import Path
from typing import Any

import mlflow
from prefect import flow, task

from ..config import settings
from ..evaluation import RunEvaluator
from ..monitoring import record_flow_metrics, setup_tracing
from .training_pipeline import (
    evaluate_task,
    load_config_task,
    log_to_mlflow_task,
    train_stage_task,
)

# keys that turn the full method into the ablation
ABLATION_OVERRIDES = {
    "loss": {"reproj_weight": 0.0},
    "mixup": {"enabled": False},
}


def ablation_config(config_data: dict[str, Any], output_dir: str) -> dict[str, Any]:
    """Copy of a config snapshot with the re-projection loss and mixup switched off"""
    data = {**config_data, "output_dir": output_dir}
    for section, values in ABLATION_OVERRIDES.items():
        data[section] = {**config_data.get(section, {}), **values}
    return data


@task(name="compare_runs")
def compare_runs_task(full: dict[str, Any], ablation: dict[str, Any]) -> dict[str, Any]:
    """Error ratio ablation/full with summary statistics and tests"""
    return RunEvaluator.compare(full, ablation, "full", "ablation")


@flow(name="ablation_flow", log_prints=True)
def ablation_flow(
    config_path: str,
    overrides: dict[str, Any] | None = None,
    stage: int = 1,
    n_pairs: int = 64,
    yaw_gap: float = 0.3,
    log_mlflow: bool = True,
) -> dict[str, Any]:
    """
    Train the full method and the ablation with the same seed, evaluate both
    on the same pose pairs and report the error ratio

    Args:
        config_path: Config of the full method
        overrides: Extra config keys applied to both runs
        stage: 1 trains stage 1 only; 2 trains both stages
        n_pairs: Pose pairs of the evaluation
        yaw_gap: Yaw gap of the evaluation pairs
        log_mlflow: Log both runs and the comparison to MLflow

    Returns:
        Dictionary with both evaluations and the comparison
    """
    setup_tracing()
    flow_start_time = time.time()
    try:
        full_data = load_config_task(config_path, overrides)
        root = Path(full_data["output_dir"])
        full_data = {**full_data, "output_dir": str(root / "full")}
        ablated_data = ablation_config(full_data, str(root / "ablation"))

        results: dict[str, Any] = {}
        for name, data in (("full", full_data), ("ablation", ablated_data)):
            training = train_stage_task(data, 1)
            if stage == 2:
                training = train_stage_task(data, 2, training["checkpoint"])
            evaluation = evaluate_task(training["checkpoint"], n_pairs, yaw_gap, data["seed"])
            if log_mlflow:
                log_to_mlflow_task(f"ablation_{name}", data, training, evaluation)
            results[name] = {"training": training, "evaluation": evaluation}

        comparison = compare_runs_task(results["full"]["evaluation"],
                                       results["ablation"]["evaluation"])
        print(
            f"Ablation/full re-projection error ratio: {comparison['ratio']:.3f} "
            f"(Welch p = {comparison['t_test']['pvalue']})"
        )

        if log_mlflow:
            mlflow.set_tracking_uri(settings.mlflow_tracking_uri)
            mlflow.set_experiment(settings.experiment_name)
            with mlflow.start_run(run_name="ablation_comparison"):
                mlflow.log_metric("error_ratio", comparison["ratio"])
                if comparison["t_test"]["pvalue"] is not None:
                    mlflow.log_metric("welch_pvalue", comparison["t_test"]["pvalue"])
                mlflow.log_dict(comparison, "comparison.json")

        record_flow_metrics("ablation_flow", time.time() - flow_start_time, True)
        return {**results, "comparison": comparison}
    except Exception:
        record_flow_metrics("ablation_flow", time.time() - flow_start_time, False)
        raise
