"""Training loop: batches, CSV log, checkpoints and diagnostic dumps"""

from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Any

import pandas as pd

from ..monitoring import TrainingMetricsCollector, record_nonfinite_abort, record_training_step
from ..monitoring.tracing import traced
from ..objectives import LOG_COLUMNS, LossReport
from .checkpoint import save_checkpoint
from .exceptions import NonFiniteLossError
from .state import TrainState
from .steps import train_step

LOG_NAME = "train_log.csv"


def checkpoint_name(step: int) -> str:
    return f"ckpt_{step:07d}.mvcg"


class Trainer:
    """
    Runs both stages of a TrainState to completion

    Rows of the CSV log are buffered and flushed at every checkpoint, so the
    log on disk always matches the latest checkpoint. A resumed run first
    drops rows at or beyond the restored step.
    """

    def __init__(self, state: TrainState, output_dir: str | Path | None = None,
                 run_name: str | None = None, verbose: bool = True):
        self.state = state
        self.output_dir = Path(output_dir or state.config.output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.run_name = run_name or self.output_dir.name
        self.verbose = verbose
        self.log_path = self.output_dir / LOG_NAME
        self._rows: list[dict[str, Any]] = []
        self.last_report: LossReport | None = None
        self.checkpoints: list[Path] = []
        self._truncate_log()

    def _truncate_log(self) -> None:
        if not self.log_path.exists():
            return
        log = pd.read_csv(self.log_path)
        log = log[log["step"] < self.state.step]
        log.to_csv(self.log_path, index=False)

    def flush_log(self) -> None:
        """Append buffered rows to the CSV log"""
        if not self._rows:
            return
        frame = pd.DataFrame(self._rows, columns=list(LOG_COLUMNS))
        frame.to_csv(self.log_path, mode="a", header=not self.log_path.exists(), index=False)
        self._rows.clear()

    def save(self) -> Path:
        """Flush the log and checkpoint the current step"""
        self.flush_log()
        path = save_checkpoint(self.state, self.output_dir / checkpoint_name(self.state.step))
        self.checkpoints.append(path)
        return path

    def write_diagnostic(self, error: NonFiniteLossError) -> Path:
        """Dump the failing step's context next to the checkpoints"""
        path = self.output_dir / f"nonfinite_step{error.step}.json"
        payload = {
            "step": error.step,
            "stage": error.stage,
            "components": {k: float(v) for k, v in error.components.items()},
            "eta": error.eta,
            "message": str(error),
        }
        path.write_text(json.dumps(payload, indent=2, default=str), encoding="utf-8")
        return path

    def _next_batch(self):
        if self.state.dataset is None:
            raise RuntimeError("training state has no dataset")
        return self.state.dataset.next_batch(self.state.config.batch_size)

    def step(self) -> LossReport:
        """Run one iteration and buffer its log row"""
        config = self.state.config
        phase = self.state.phase
        start = time.time()
        report = train_step(self.state, self._next_batch())
        record_training_step(
            phase.stage, time.time() - start, report.components, phase.fade_alpha,
            phase.resolution,
        )
        if report.step % config.log_every == 0:
            self._rows.append(report.to_row())
        self.last_report = report
        return report

    def run(self, until: int | None = None) -> LossReport | None:
        """
        Train until the config's total step count (or `until`)

        Args:
            until: Optional global step to stop at, e.g. end of stage 1

        Returns:
            The last LossReport, None if no step ran

        Raises:
            NonFiniteLossError: After writing a diagnostic dump
        """
        config = self.state.config
        stop = config.total_steps if until is None else min(until, config.total_steps)
        with TrainingMetricsCollector(self.run_name):
            while self.state.step < stop:
                stage = self.state.stage
                with traced(f"train.stage{stage}", start_step=self.state.step):
                    self._run_stage(stage, stop)
            if not self.checkpoints or self.checkpoints[-1].name != checkpoint_name(self.state.step):
                self.save()
        return self.last_report

    def _run_stage(self, stage: int, stop: int) -> None:
        config = self.state.config
        while self.state.step < stop and self.state.stage == stage:
            try:
                report = self.step()
            except NonFiniteLossError as e:
                self.flush_log()
                dump = self.write_diagnostic(e)
                record_nonfinite_abort(e.stage)
                print(f"Error: {e}. Diagnostics written to {dump}")
                raise
            if self.state.step % config.checkpoint_every == 0:
                path = self.save()
                if self.verbose:
                    phase = self.state.phase
                    print(
                        f"step {self.state.step}/{config.total_steps} stage {phase.stage} "
                        f"res {phase.resolution} total={report.total:.4f} -> {path.name}"
                    )
