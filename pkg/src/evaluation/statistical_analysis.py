"""Statistical comparison of per-pair error samples"""

from typing import Any

import numpy as np
from scipy import stats


class StatisticalAnalyzer:
    """Summaries and two-sample tests over evaluation errors"""

    @staticmethod
    def compute_summary_statistics(values: list[float]) -> dict[str, float]:
        """
        Compute summary statistics for a list of values

        Returns:
            Dictionary with summary statistics; empty for no values
        """
        if len(values) == 0:
            return {}

        arr = np.asarray(values, dtype=np.float64)
        return {
            "mean": float(np.mean(arr)),
            "median": float(np.median(arr)),
            "std": float(np.std(arr)),
            "min": float(np.min(arr)),
            "max": float(np.max(arr)),
            "q25": float(np.percentile(arr, 25)),
            "q75": float(np.percentile(arr, 75)),
            "count": int(arr.size),
        }

    @staticmethod
    def welch_t_test(
        group1: list[float], group2: list[float], alternative: str = "two-sided"
    ) -> dict[str, Any]:
        """
        Unequal-variance t-test

        Args:
            group1: First sample
            group2: Second sample
            alternative: 'two-sided', 'less' or 'greater'

        Returns:
            Dictionary with test results
        """
        try:
            statistic, pvalue = stats.ttest_ind(
                group1, group2, equal_var=False, alternative=alternative
            )
            return {
                "statistic": float(statistic),
                "pvalue": float(pvalue),
                "significant": bool(pvalue < 0.05),
                "alternative": alternative,
            }
        except Exception as e:
            return {
                "statistic": None,
                "pvalue": None,
                "significant": False,
                "error": str(e),
            }

    @staticmethod
    def mann_whitney_u_test(
        group1: list[float], group2: list[float], alternative: str = "two-sided"
    ) -> dict[str, Any]:
        """Non-parametric counterpart of welch_t_test"""
        try:
            statistic, pvalue = stats.mannwhitneyu(group1, group2, alternative=alternative)
            return {
                "statistic": float(statistic),
                "pvalue": float(pvalue),
                "significant": bool(pvalue < 0.05),
                "alternative": alternative,
            }
        except Exception as e:
            return {
                "statistic": None,
                "pvalue": None,
                "significant": False,
                "error": str(e),
            }

    @staticmethod
    def compare_runs(
        errors_a: list[float],
        errors_b: list[float],
        name_a: str = "a",
        name_b: str = "b",
    ) -> dict[str, Any]:
        """
        Compare two runs' per-pair errors

        The ratio is mean(b) / mean(a), so a ratio above 1 means run b has the
        larger error. The one-sided tests ask whether a is smaller than b.

        Args:
            errors_a: Per-pair errors of the first run
            errors_b: Per-pair errors of the second run
            name_a: Label of the first run
            name_b: Label of the second run

        Returns:
            Dictionary with both summaries, the ratio and test results
        """
        summary_a = StatisticalAnalyzer.compute_summary_statistics(errors_a)
        summary_b = StatisticalAnalyzer.compute_summary_statistics(errors_b)
        if not summary_a or not summary_b:
            raise ValueError("compare_runs needs at least one error per run")

        mean_a, mean_b = summary_a["mean"], summary_b["mean"]
        ratio = mean_b / mean_a if mean_a > 0 else float("inf")

        pooled_std = np.sqrt((np.var(errors_a) + np.var(errors_b)) / 2)
        cohens_d = (mean_a - mean_b) / pooled_std if pooled_std > 0 else 0.0

        return {
            name_a: summary_a,
            name_b: summary_b,
            "ratio": float(ratio),
            "mean_diff": mean_a - mean_b,
            "t_test": StatisticalAnalyzer.welch_t_test(errors_a, errors_b, "less"),
            "mann_whitney_u_test": StatisticalAnalyzer.mann_whitney_u_test(
                errors_a, errors_b, "less"
            ),
            "effect_size_cohens_d": float(cohens_d),
        }

    @staticmethod
    def trend(values: list[float], window: int) -> dict[str, float]:
        """
        Mean of the first and last `window` values of a series

        Used to check that a loss decreases over a training window.
        """
        arr = np.asarray(values, dtype=np.float64)
        arr = arr[np.isfinite(arr)]
        if arr.size == 0:
            raise ValueError("trend needs at least one finite value")
        window = max(1, min(window, arr.size))
        first, last = float(arr[:window].mean()), float(arr[-window:].mean())
        return {"first_mean": first, "last_mean": last, "decreased": last < first}
