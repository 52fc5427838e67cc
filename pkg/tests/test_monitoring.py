"""Tests for Prometheus metrics and tracing helpers"""

import pytest
from prometheus_client import REGISTRY

from src.config import settings
from src.monitoring import (
    TrainingMetricsCollector,
    record_flow_metrics,
    record_nonfinite_abort,
    record_training_step,
    setup_tracing,
    traced,
)
from src.monitoring import tracing


def _value(name, **labels):
    return REGISTRY.get_sample_value(name, labels) or 0.0


def test_record_training_step_updates_gauges():
    """Test step counters and the latest loss gauges"""
    before = _value("training_steps_total", stage="2")
    record_training_step(2, 0.1, {"mrf": 0.25, "g_adv": 0.7}, fade_alpha=0.5, resolution=64)
    assert _value("training_steps_total", stage="2") == before + 1
    assert _value("training_loss", component="mrf") == 0.25
    assert _value("training_fade_alpha") == 0.5
    assert _value("training_resolution") == 64


def test_nonfinite_abort_counter():
    """Test aborts are counted per stage"""
    before = _value("training_nonfinite_aborts_total", stage="1")
    record_nonfinite_abort(1)
    assert _value("training_nonfinite_aborts_total", stage="1") == before + 1


def test_collector_counts_failed_runs():
    """Test the run collector records status and leaves no active run behind"""
    name = "collector-test"
    with pytest.raises(RuntimeError):
        with TrainingMetricsCollector(name):
            assert _value("active_training_runs", run_name=name) == 1
            raise RuntimeError("boom")
    assert _value("active_training_runs", run_name=name) == 0
    assert _value("training_runs_total", run_name=name, status="failure") == 1


def test_flow_metrics():
    """Test flow outcomes are counted"""
    before = _value("prefect_flow_runs_total", flow_name="unit", status="success")
    record_flow_metrics("unit", 1.5, True)
    assert _value("prefect_flow_runs_total", flow_name="unit", status="success") == before + 1


def test_traced_runs_block():
    """Test the tracing context manager runs its block with or without a provider"""
    ran = []
    with traced("unit.span", step=3):
        ran.append(True)
    assert ran == [True]


def test_setup_tracing_respects_settings(monkeypatch):
    """Test tracing stays on the no-op provider unless enabled in the settings"""
    monkeypatch.setattr(tracing, "_configured", False)
    monkeypatch.setattr(settings, "tracing_enabled", False)
    assert setup_tracing() is False
    assert tracing._configured is False


def test_setup_tracing_runs_once(monkeypatch):
    """Test a configured process does not install a second exporter"""
    monkeypatch.setattr(tracing, "_configured", True)
    monkeypatch.setattr(settings, "tracing_enabled", True)
    assert setup_tracing() is True
