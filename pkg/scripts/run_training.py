#!/usr/bin/env python3
"""Script to run the two-stage training pipeline"""

import argparse
import json
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.workflows.training_pipeline import training_pipeline


def main():
    parser = argparse.ArgumentParser(
        description="Train a multi-view consistent radiance-field GAN",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Desk profile on synthetic spheres
  python scripts/run_training.py --config configs/desk.conf

  # Short smoke run without MLflow
  python scripts/run_training.py --config configs/smoke.conf --no-mlflow --n-pairs 8
        """,
    )
    parser.add_argument("--config", type=str, required=True, help="Config file")
    parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    parser.add_argument("--out", type=str, default=None, help="Override output_dir")
    parser.add_argument("--resume", type=str, default=None, help="Checkpoint to resume from")
    parser.add_argument("--n-pairs", type=int, default=64, help="Evaluation pose pairs")
    parser.add_argument("--yaw-gap", type=float, default=0.3, help="Evaluation yaw gap")
    parser.add_argument(
        "--no-eval", dest="evaluate", action="store_false", help="Skip the evaluation"
    )
    parser.add_argument(
        "--no-mlflow", dest="log_mlflow", action="store_false", help="Skip MLflow logging"
    )

    args = parser.parse_args()

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out

    result = training_pipeline(
        config_path=args.config,
        overrides=overrides,
        resume=args.resume,
        evaluate=args.evaluate,
        n_pairs=args.n_pairs,
        yaw_gap=args.yaw_gap,
        log_mlflow=args.log_mlflow,
    )

    print("\n" + "=" * 50)
    print("Training Completed")
    print("=" * 50)
    print(f"Final checkpoint: {result['training']['checkpoint']}")
    report = result["training"]["report"]
    if report:
        print(f"Final losses: {json.dumps(report['components'], indent=2)}")
    if result["evaluation"]:
        reprojection = result["evaluation"]["reprojection"]
        print(f"Re-projection error: {reprojection.get('mean')}")
        print(f"Improvement over initialization: {result['evaluation']['improvement']:.1%}")
        print(f"Collapse check passed: {result['evaluation']['collapse']['passed']}")


if __name__ == "__main__":
    main()
