"""Command-line entry point

Exit codes: 0 ok, 1 usage error, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from .config import ConfigError, load_config
from .evaluation import RunEvaluator, reprojection_error, yaw_sweep
from .exceptions import StereoGanError
from .geometry import CameraPose, relative_transform, sample_pose
from .monitoring import setup_tracing
from .objectives import image_reproj_loss
from .pipelines import DataValidationError, colorize, make_grid, save_png
from .stereo import compute_correspondence, inverse_warp
from .stereo.pair import OPACITY_THRESHOLD
from .training import (
    Trainer,
    TrainState,
    build_state,
    latent_for_seed,
    load_checkpoint,
    map_latents,
    render_image,
    render_primary,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

GRID_PER_ROW = 8


class CommandError(StereoGanError):
    """A command cannot run on the given inputs"""

    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pose_arg(text: str) -> CameraPose:
    """'yaw,pitch' in radians"""
    try:
        yaw, pitch = (float(part) for part in text.split(","))
        return CameraPose(pitch=pitch, yaw=yaw)
    except Exception as e:
        raise argparse.ArgumentTypeError(f"expected 'yaw,pitch' in radians, got {text!r}") from e


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _load(checkpoint: str) -> TrainState:
    return load_checkpoint(checkpoint, with_dataset=False)


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args: argparse.Namespace) -> int:
    """Run both stages per config, or resume from a checkpoint"""
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    config = load_config(args.config, overrides)
    state = load_checkpoint(args.checkpoint) if args.checkpoint else build_state(config)
    trainer = Trainer(state, args.out or state.config.output_dir)
    report = trainer.run(args.until)
    if report is not None:
        print(f"Finished at step {state.step}: total loss {report.total:.5f}")
    print(f"Checkpoint: {trainer.checkpoints[-1]}")
    return EXIT_OK


def cmd_render_sweep(args: argparse.Namespace) -> int:
    """One PNG per yaw plus a contact sheet"""
    state = _load(args.checkpoint)
    out = _out_dir(args.out)
    w = map_latents(state, latent_for_seed(state, args.seed))
    images = []
    for i, pose in enumerate(yaw_sweep(args.n_views, args.yaw_range, state.config.radius)):
        image = render_image(state, w, pose)
        save_png(out / f"view_{i:03d}.png", image)
        images.append(image)
    save_png(out / "sweep_grid.png", make_grid(images, GRID_PER_ROW))
    print(f"Wrote {len(images)} views to {out}")
    return EXIT_OK


def cmd_interpolate(args: argparse.Namespace) -> int:
    """Linear interpolation of style (w by default, z with --z-space) and pose"""
    if args.steps < 2:
        raise CommandError(f"--steps must be at least 2, got {args.steps}")
    state = _load(args.checkpoint)
    out = _out_dir(args.out)
    z_a, z_b = latent_for_seed(state, args.seed_a), latent_for_seed(state, args.seed_b)
    ts = np.linspace(0.0, 1.0, args.steps)
    if args.z_space:
        ws = map_latents(state, np.stack([(1 - t) * z_a + t * z_b for t in ts]))
    else:
        w_a, w_b = map_latents(state, z_a), map_latents(state, z_b)
        ws = np.stack([(1 - t) * w_a + t * w_b for t in ts])
    images = []
    for i, (t, w) in enumerate(zip(ts, ws)):
        pose = args.pose_a.lerp(args.pose_b, float(t)).model_copy(
            update={"radius": state.config.radius}
        )
        image = render_image(state, w, pose)
        save_png(out / f"frame_{i:03d}.png", image)
        images.append(image)
    save_png(out / "interpolation_grid.png", make_grid(images, GRID_PER_ROW))
    if args.dump_latents:
        np.save(out / "latents.npy", ws)
    print(f"Wrote {len(images)} frames to {out}")
    return EXIT_OK


def cmd_style_mix(args: argparse.Namespace) -> int:
    """2x2 grid of radiance-field style against decoder style"""
    state = _load(args.checkpoint)
    if state.trained_phase.stage != 2:
        raise CommandError(
            f"checkpoint {args.checkpoint} is a stage 1 checkpoint; style mixing needs the decoder"
        )
    out = _out_dir(args.out)
    w_a = map_latents(state, latent_for_seed(state, args.seed_a))
    w_b = map_latents(state, latent_for_seed(state, args.seed_b))
    pose = CameraPose(pitch=0.0, yaw=0.0, radius=state.config.radius)
    cells = {
        "AA": (w_a, w_a),
        "BB": (w_b, w_b),
        "AB": (w_a, w_b),
        "BA": (w_b, w_a),
    }
    images = {}
    for name, (w_field, w_decoder) in cells.items():
        images[name] = render_image(state, w_field, pose, w_decoder)
        save_png(out / f"style_{name}.png", images[name])
    grid = make_grid([images["AA"], images["AB"], images["BA"], images["BB"]], per_row=2)
    save_png(out / "style_grid.png", grid)
    print(f"Wrote style-mixing grid to {out}")
    return EXIT_OK


def cmd_warp_debug(args: argparse.Namespace) -> int:
    """Primary, auxiliary, warped, residual, validity and depth images plus L_ir"""
    state = _load(args.checkpoint)
    out = _out_dir(args.out)
    w = map_latents(state, latent_for_seed(state, args.seed))
    radius = state.config.radius
    pri = args.pri_pose.model_copy(update={"radius": radius})
    aux = args.aux_pose.model_copy(update={"radius": radius})

    primary = render_primary(state, w, pri)
    auxiliary = render_primary(state, w, aux)
    K = state.intrinsics()
    corr = compute_correspondence(primary.depth, K, relative_transform(pri, aux))
    valid = corr.valid & (primary.opacity.data > OPACITY_THRESHOLD)
    warped, _ = inverse_warp(auxiliary.color, corr)
    loss = image_reproj_loss(primary.color, warped, valid, state.config.mu_ssim).item()

    residual = np.abs(primary.color.data - warped.data).mean(axis=0) * valid
    save_png(out / "primary.png", primary.color.data)
    save_png(out / "auxiliary.png", auxiliary.color.data)
    save_png(out / "warped.png", warped.data * valid)
    save_png(out / "residual.png", colorize(residual, "magma", vmin=0.0), linear=False)
    save_png(out / "valid.png", np.repeat(valid[None].astype(np.float64), 3, axis=0),
             linear=False)
    save_png(out / "depth.png",
             colorize(primary.depth.data, "viridis", state.config.near, state.config.far),
             linear=False)
    print(f"L_ir = {loss:.6g} (valid fraction {valid.mean():.3f})")
    return EXIT_OK


def cmd_export_views(args: argparse.Namespace) -> int:
    """n posed renders plus poses.csv for external reconstruction tools"""
    state = _load(args.checkpoint)
    out = _out_dir(args.out)
    rng = np.random.default_rng(args.seed)
    w = map_latents(state, latent_for_seed(state, args.seed))
    width = max(4, len(str(args.n - 1)))
    rows = []
    for i in range(args.n):
        pose = sample_pose(state.pose_dist, rng)
        save_png(out / f"view_{i:0{width}d}.png", render_image(state, w, pose))
        rows.append({
            "index": i,
            "yaw_rad": pose.yaw,
            "pitch_rad": pose.pitch,
            "fov_deg": state.config.fov_deg,
            "radius": pose.radius,
        })
    pd.DataFrame(rows, columns=["index", "yaw_rad", "pitch_rad", "fov_deg", "radius"]).to_csv(
        out / "poses.csv", index=False
    )
    print(f"Exported {args.n} views to {out}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    """Print the re-projection error summary as JSON"""
    state = _load(args.checkpoint)
    if args.full:
        summary = RunEvaluator(args.n_pairs, args.yaw_gap, args.seed).evaluate_state(state)
    else:
        summary = reprojection_error(state, args.n_pairs, args.yaw_gap, args.seed)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="stereo-gan",
        description="Train and inspect multi-view consistent radiance-field GANs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  stereo-gan train --config configs/desk.conf --out runs/desk
  stereo-gan render-sweep --checkpoint runs/desk/ckpt_0020000.mvcg --n-views 35 --out sweep
  stereo-gan warp-debug --checkpoint runs/desk/ckpt_0020000.mvcg --aux-pose 0.3,0 --out debug
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, func: Callable[[argparse.Namespace], int], help_text: str,
                needs_checkpoint: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(func=func)
        if needs_checkpoint:
            p.add_argument("--checkpoint", required=True, help="Checkpoint file")
        p.add_argument("--seed", type=int, default=None if name == "train" else 0,
                       help="Seed of latents and poses")
        return p

    p = command("train", cmd_train, "Run both training stages", needs_checkpoint=False)
    p.add_argument("--config", required=True, help="Flat key-value config file")
    p.add_argument("--checkpoint", default=None, help="Resume from this checkpoint")
    p.add_argument("--out", default=None, help="Run directory (overrides output_dir)")
    p.add_argument("--until", type=int, default=None, help="Stop at this global step")

    p = command("render-sweep", cmd_render_sweep, "Render a yaw sweep of one identity")
    p.add_argument("--n-views", type=_positive_int, default=35)
    p.add_argument("--yaw-range", type=float, default=0.7, help="Total yaw span in radians")
    p.add_argument("--out", required=True)

    p = command("interpolate", cmd_interpolate, "Interpolate style and pose between two seeds")
    p.add_argument("--seed-a", type=int, required=True)
    p.add_argument("--seed-b", type=int, required=True)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--pose-a", type=_pose_arg, default=CameraPose(pitch=0.0, yaw=-0.25))
    p.add_argument("--pose-b", type=_pose_arg, default=CameraPose(pitch=0.0, yaw=0.25))
    p.add_argument("--z-space", action="store_true", help="Interpolate z instead of w")
    p.add_argument("--dump-latents", action="store_true", help="Write latents.npy")
    p.add_argument("--out", required=True)

    p = command("style-mix", cmd_style_mix, "Swap radiance-field and decoder styles")
    p.add_argument("--seed-a", type=int, required=True)
    p.add_argument("--seed-b", type=int, required=True)
    p.add_argument("--out", required=True)

    p = command("warp-debug", cmd_warp_debug, "Visualize the stereo warp of one pose pair")
    p.add_argument("--pri-pose", type=_pose_arg, default=CameraPose(pitch=0.0, yaw=0.0))
    p.add_argument("--aux-pose", type=_pose_arg, default=CameraPose(pitch=0.0, yaw=0.3))
    p.add_argument("--out", required=True)

    p = command("export-views", cmd_export_views, "Export posed renders and poses.csv")
    p.add_argument("--n", type=_positive_int, default=32)
    p.add_argument("--out", required=True)

    p = command("evaluate", cmd_evaluate, "Print the re-projection error summary as JSON")
    p.add_argument("--n-pairs", type=_positive_int, default=64)
    p.add_argument("--yaw-gap", type=float, default=0.3)
    p.add_argument("--full", action="store_true", help="Add the collapse check and timings")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    setup_tracing()
    try:
        return args.func(args)
    except (ConfigError, DataValidationError) as e:
        print(f"Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (StereoGanError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
