"""Tests for consistency evaluation and run comparison"""

import numpy as np
import pytest

from src.evaluation import (
    PerformanceMetrics,
    RunEvaluator,
    StatisticalAnalyzer,
    collapse_check,
    pose_pairs,
    reprojection_error,
    yaw_sweep,
)


def test_collapse_check_flags_flat_views(rng):
    """Test constant views fail and textured views pass"""
    textured = [rng.uniform(0, 1, (3, 8, 8)) for _ in range(3)]
    result = collapse_check(textured)
    assert result["passed"] and result["all_finite"]
    assert len(result["per_view_std"]) == 3

    flat = textured[:2] + [np.full((3, 8, 8), 0.5)]
    result = collapse_check(flat)
    assert not result["passed"]
    assert result["min_std"] == 0.0


def test_collapse_check_flags_nonfinite(rng):
    """Test a NaN view fails the check"""
    bad = rng.uniform(0, 1, (3, 4, 4))
    bad[0, 0, 0] = np.nan
    result = collapse_check([rng.uniform(0, 1, (3, 4, 4)), bad])
    assert not result["all_finite"]
    assert not result["passed"]
    assert not collapse_check([])["passed"]


def test_yaw_sweep():
    """Test evenly spaced yaws centered on zero"""
    poses = yaw_sweep(5, 0.8, radius=1.2)
    assert [p.yaw for p in poses] == pytest.approx([-0.4, -0.2, 0.0, 0.2, 0.4])
    assert all(p.pitch == 0.0 and p.radius == 1.2 for p in poses)
    assert yaw_sweep(1, 0.8)[0].yaw == 0.0
    with pytest.raises(ValueError, match="n_views"):
        yaw_sweep(0, 0.8)


def test_pose_pairs_share_pitch(tiny_state):
    """Test auxiliary cameras sit yaw_gap beside the primary at equal pitch"""
    for pri, aux in pose_pairs(tiny_state, 4, 0.3, np.random.default_rng(0)):
        assert aux.pitch == pri.pitch
        assert aux.yaw == pytest.approx(pri.yaw + 0.3)


def test_reprojection_error_is_seeded(tiny_state):
    """Test equal seeds evaluate the same pairs"""
    a = reprojection_error(tiny_state, n_pairs=3, yaw_gap=0.2, seed=4)
    b = reprojection_error(tiny_state, n_pairs=3, yaw_gap=0.2, seed=4)
    assert a["errors"] == b["errors"]
    assert len(a["errors"]) + a["skipped"] == 3
    assert a["step"] == 0
    if a["errors"]:
        assert a["count"] == len(a["errors"])
        assert all(e >= 0.0 for e in a["errors"])
        assert 0.0 < a["valid_fraction"] <= 1.0
    with pytest.raises(ValueError, match="n_pairs"):
        reprojection_error(tiny_state, n_pairs=0)


def test_evaluate_state_sections(tiny_state):
    """Test a state evaluation reports every section"""
    evaluation = RunEvaluator(n_pairs=2, sweep_views=3).evaluate_state(tiny_state)
    assert set(evaluation) == {"reprojection", "collapse", "performance"}
    assert len(evaluation["collapse"]["per_view_std"]) == 3
    assert evaluation["performance"]["evaluation_seconds"] >= 0.0
    assert evaluation["performance"]["cpu_count_logical"] >= 1
    assert evaluation["performance"]["total_memory_mb"] > 0.0


def test_compare_and_improvement():
    """Test the error ratio and the relative improvement"""
    full = {"reprojection": {"mean": 0.1, "errors": [0.1, 0.09, 0.11, 0.1]}}
    ablation = {"reprojection": {"mean": 0.2, "errors": [0.2, 0.21, 0.19, 0.2]}}
    comparison = RunEvaluator.compare(full, ablation)
    assert comparison["ratio"] == pytest.approx(2.0)
    assert comparison["t_test"]["significant"]
    assert set(comparison) >= {"full", "ablation", "mann_whitney_u_test"}
    assert RunEvaluator.improvement(ablation, full) == pytest.approx(0.5)
    assert RunEvaluator.improvement({"reprojection": {}}, full) == 0.0


def test_summary_statistics():
    """Test summaries and the empty case"""
    stats = StatisticalAnalyzer.compute_summary_statistics([1.0, 2.0, 3.0, 4.0])
    assert stats["mean"] == 2.5 and stats["median"] == 2.5 and stats["count"] == 4
    assert StatisticalAnalyzer.compute_summary_statistics([]) == {}
    with pytest.raises(ValueError, match="at least one error"):
        StatisticalAnalyzer.compare_runs([], [1.0])


def test_trend_window():
    """Test first and last window means, ignoring NaN"""
    result = StatisticalAnalyzer.trend([4.0, 3.0, float("nan"), 2.0, 1.0], window=2)
    assert result == {"first_mean": 3.5, "last_mean": 1.5, "decreased": True}
    with pytest.raises(ValueError, match="finite"):
        StatisticalAnalyzer.trend([float("nan")], window=1)


def test_throughput_and_runtime():
    """Test step rates and measured calls"""
    assert PerformanceMetrics.throughput(10, 2.0) == {"steps_per_second": 5.0,
                                                      "seconds_per_step": 0.2}
    assert PerformanceMetrics.throughput(0, 1.0)["steps_per_second"] == 0.0
    result, elapsed = PerformanceMetrics.measure_runtime(sum, [1, 2, 3])
    assert result == 6 and elapsed >= 0.0
