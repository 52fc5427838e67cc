#!/usr/bin/env python3
"""Script to compare the full method against the no-consistency ablation"""

import argparse
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.workflows.ablation import ablation_flow


def main():
    parser = argparse.ArgumentParser(
        description="Train the full method and the ablation, then compare re-projection errors",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python scripts/run_ablation.py --config configs/desk.conf
  python scripts/run_ablation.py --config configs/smoke.conf --n-pairs 8 --no-mlflow
        """,
    )
    parser.add_argument("--config", type=str, required=True, help="Config of the full method")
    parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    parser.add_argument("--stage", type=int, choices=[1, 2], default=1,
                        help="Train stage 1 only or both stages")
    parser.add_argument("--n-pairs", type=int, default=64, help="Evaluation pose pairs")
    parser.add_argument("--yaw-gap", type=float, default=0.3, help="Evaluation yaw gap")
    parser.add_argument(
        "--no-mlflow", dest="log_mlflow", action="store_false", help="Skip MLflow logging"
    )

    args = parser.parse_args()
    overrides = {} if args.seed is None else {"seed": args.seed}

    result = ablation_flow(
        config_path=args.config,
        overrides=overrides,
        stage=args.stage,
        n_pairs=args.n_pairs,
        yaw_gap=args.yaw_gap,
        log_mlflow=args.log_mlflow,
    )

    comparison = result["comparison"]
    print("\n" + "=" * 50)
    print("Ablation Comparison")
    print("=" * 50)
    print(f"Full method mean error:  {comparison['full']['mean']:.6f}")
    print(f"Ablation mean error:     {comparison['ablation']['mean']:.6f}")
    print(f"Ratio (ablation / full): {comparison['ratio']:.3f}")
    print(f"Welch t-test p-value:    {comparison['t_test']['pvalue']}")


if __name__ == "__main__":
    main()
