"""Runtime and resource usage of training and evaluation runs"""

import os
import time
from typing import Any, Callable

import psutil


class PerformanceMetrics:
    """Collect wall time, memory and CPU figures with psutil"""

    @staticmethod
    def measure_runtime(func: Callable[..., Any], *args, **kwargs) -> tuple[Any, float]:
        """
        Measure execution time of a function

        Returns:
            Tuple of (function_result, elapsed_time_seconds)
        """
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        return result, time.perf_counter() - start_time

    @staticmethod
    def get_memory_usage() -> dict[str, float]:
        """
        Get current memory usage of this process

        Returns:
            Dictionary with memory metrics in MB
        """
        process = psutil.Process(os.getpid())
        memory_info = process.memory_info()
        return {
            "memory_rss_mb": memory_info.rss / 1024 / 1024,
            "memory_vms_mb": memory_info.vms / 1024 / 1024,
            "memory_percent": process.memory_percent(),
        }

    @staticmethod
    def get_system_info() -> dict[str, Any]:
        """CPU count and total memory of the host"""
        return {
            "cpu_count": psutil.cpu_count(logical=False),
            "cpu_count_logical": psutil.cpu_count(logical=True),
            "total_memory_mb": psutil.virtual_memory().total / 1024 / 1024,
        }

    @staticmethod
    def measure_with_resources(func: Callable[..., Any], *args, **kwargs
                               ) -> tuple[Any, dict[str, Any]]:
        """
        Run a function and attach its runtime and memory footprint

        Args:
            func: Function to measure, e.g. Trainer.run
            *args: Positional arguments for function
            **kwargs: Keyword arguments for function

        Returns:
            Tuple of (function_result, metrics_dict)
        """
        before = PerformanceMetrics.get_memory_usage()
        process = psutil.Process(os.getpid())
        cpu_before = process.cpu_times()

        result, elapsed = PerformanceMetrics.measure_runtime(func, *args, **kwargs)

        after = PerformanceMetrics.get_memory_usage()
        cpu_after = process.cpu_times()
        cpu_seconds = (cpu_after.user - cpu_before.user) + (cpu_after.system - cpu_before.system)

        metrics = {
            "elapsed_time_seconds": elapsed,
            "cpu_time_seconds": cpu_seconds,
            "initial_memory_mb": before["memory_rss_mb"],
            "final_memory_mb": after["memory_rss_mb"],
            "memory_delta_mb": after["memory_rss_mb"] - before["memory_rss_mb"],
        }
        return result, metrics

    @staticmethod
    def throughput(steps: int, elapsed_seconds: float) -> dict[str, float]:
        """Training steps per second and seconds per step"""
        if steps <= 0 or elapsed_seconds <= 0:
            return {"steps_per_second": 0.0, "seconds_per_step": 0.0}
        return {
            "steps_per_second": steps / elapsed_seconds,
            "seconds_per_step": elapsed_seconds / steps,
        }
