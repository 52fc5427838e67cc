"""Two-stage training: state, steps, optimizer, checkpoints and the run loop"""

from .checkpoint import (
    FORMAT_VERSION,
    MAGIC,
    load_checkpoint,
    read_checkpoint,
    read_manifest,
    save_checkpoint,
)
from .exceptions import CheckpointError, NonFiniteLossError
from .inference import latent_for_seed, map_latents, render_image, render_primary
from .optimizer import Adam, AdamState, adam_update, lr_schedule
from .state import Phase, TrainState, build_dataset, build_state, phase_at, render_options
from .steps import generate_pairs, to_signed, train_step, train_step_stage1, train_step_stage2
from .trainer import LOG_NAME, Trainer, checkpoint_name

__all__ = [
    "Adam",
    "AdamState",
    "CheckpointError",
    "FORMAT_VERSION",
    "LOG_NAME",
    "MAGIC",
    "NonFiniteLossError",
    "Phase",
    "TrainState",
    "Trainer",
    "adam_update",
    "build_dataset",
    "build_state",
    "checkpoint_name",
    "generate_pairs",
    "latent_for_seed",
    "load_checkpoint",
    "lr_schedule",
    "map_latents",
    "phase_at",
    "read_checkpoint",
    "read_manifest",
    "render_image",
    "render_options",
    "render_primary",
    "save_checkpoint",
    "to_signed",
    "train_step",
    "train_step_stage1",
    "train_step_stage2",
]
