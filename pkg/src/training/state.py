"""Mutable training state and the step-derived schedule"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..config import TrainConfig
from ..geometry import CameraPose, Intrinsics, PoseDistribution, intrinsics_from_fov, sample_pose
from ..networks import MappingNetwork, ProgressiveDecoder, ProgressiveDiscriminator, RadianceField
from ..pipelines import DatasetHandle, FolderDataset, SyntheticDataset, SyntheticScene
from ..rendering import RenderOptions
from .optimizer import Adam

# parameter-name prefixes of the four networks, also used by checkpoints
NETWORK_PREFIXES = ("g_m", "g_s", "g_d", "d")


@dataclass(frozen=True)
class Phase:
    """Where a global step falls in the two-stage schedule"""

    stage: int
    resolution: int
    stage_step: int
    fade_alpha: float


def phase_at(config: TrainConfig, step: int) -> Phase:
    """
    Stage, resolution and fade coefficient of a global step

    Stage 1 covers the first stage1_steps steps at the base resolution. Each
    further resolution then gets stage2_steps_per_resolution steps, the first
    fade_steps of which ramp fade_alpha linearly from 0 to 1.
    """
    if step < config.stage1_steps or len(config.resolutions) == 1:
        return Phase(1, config.base_resolution, step, 1.0)
    offset = step - config.stage1_steps
    per_res = max(config.stage2_steps_per_resolution, 1)
    k = min(offset // per_res + 1, len(config.resolutions) - 1)
    stage_step = offset - (k - 1) * per_res
    if config.fade_steps <= 0:
        alpha = 1.0
    else:
        alpha = min(1.0, stage_step / config.fade_steps)
    return Phase(2, config.resolutions[k], stage_step, alpha)


def pose_distribution(config: TrainConfig) -> PoseDistribution:
    return PoseDistribution(
        kind=config.pose.kind,
        h_spread=config.pose.h_spread,
        v_spread=config.pose.v_spread,
        radius=config.radius,
    )


def render_options(config: TrainConfig, want_feature: bool = False) -> RenderOptions:
    return RenderOptions(
        n_samples=config.samples_per_ray,
        near=config.near,
        far=config.far,
        want_feature=want_feature,
        background=config.background,
    )


def build_dataset(config: TrainConfig) -> DatasetHandle:
    """
    Training images at the largest configured resolution

    Lower resolutions are obtained by area downsampling at batch time.
    """
    resolution = config.resolutions[-1]
    if config.dataset:
        return FolderDataset(config.dataset, resolution, order_seed=config.seed)
    scene = SyntheticScene(
        kind=config.scene.kind, seed=config.scene.seed, shading=config.scene.shading
    )
    return SyntheticDataset(
        scene,
        count=config.scene.count,
        resolution=resolution,
        pose_dist=pose_distribution(config),
        fov_deg=config.fov_deg,
        order_seed=config.seed,
    )


@dataclass
class FixedDraw:
    """One reusable (z, primary pose, auxiliary pose) batch"""

    z: np.ndarray
    primary: list[CameraPose]
    auxiliary: list[CameraPose]


@dataclass
class TrainState:
    """
    Everything a training run mutates

    The schedule (stage, resolution, fade) is a pure function of `step`, so
    it never needs to be stored separately.
    """

    config: TrainConfig
    mapping: MappingNetwork
    field: RadianceField
    decoder: ProgressiveDecoder
    discriminator: ProgressiveDiscriminator
    opt_g: Adam
    opt_d: Adam
    rng: np.random.Generator
    dataset: DatasetHandle | None = None
    step: int = 0

    @property
    def phase(self) -> Phase:
        return phase_at(self.config, self.step)

    @property
    def stage(self) -> int:
        return self.phase.stage

    @property
    def trained_phase(self) -> Phase:
        """
        Phase of the last completed step, which is what inference renders with

        `phase` describes the next step to run: right after stage 1 finishes
        it already points at stage 2 although the decoder was never trained.
        """
        return phase_at(self.config, max(self.step - 1, 0))

    @property
    def pose_dist(self) -> PoseDistribution:
        return pose_distribution(self.config)

    def intrinsics(self, resolution: int | None = None) -> Intrinsics:
        return intrinsics_from_fov(self.config.fov_deg, resolution or self.config.base_resolution)

    def generator_networks(self) -> dict[str, object]:
        return {"g_m": self.mapping, "g_s": self.field, "g_d": self.decoder}

    def networks(self) -> dict[str, object]:
        return {**self.generator_networks(), "d": self.discriminator}

    def named_parameters(self) -> list[tuple[str, object]]:
        """Every parameter of all four networks with its prefixed name"""
        named = []
        for prefix, net in self.networks().items():
            named.extend(net.named_parameters(f"{prefix}."))
        return named

    @cached_property
    def fixed_draw(self) -> FixedDraw:
        """
        The single pair reused when fixed_pair is on

        Drawn from its own generator so it does not depend on, or disturb,
        the training stream.
        """
        rng = np.random.default_rng(self.config.seed + 1)
        batch = self.config.batch_size
        z = rng.standard_normal((batch, self.config.z_dim))
        primary = [sample_pose(self.pose_dist, rng) for _ in range(batch)]
        auxiliary = [sample_pose(self.pose_dist, rng) for _ in range(batch)]
        return FixedDraw(z, primary, auxiliary)


def build_state(config: TrainConfig, with_dataset: bool = True) -> TrainState:
    """
    Initialize networks, optimizers and generators from a config

    Args:
        config: Validated training config
        with_dataset: Construct the image source (off for inference-only use)

    Returns:
        Fresh TrainState at step 0
    """
    init_rng = np.random.default_rng(config.seed)
    mapping = MappingNetwork(init_rng, z_dim=config.z_dim, w_dim=config.w_dim)
    radiance = RadianceField(
        init_rng,
        w_dim=config.w_dim,
        width=config.field_width,
        n_layers=config.field_layers,
        feature_dim=config.feature_dim,
        use_view_dirs=config.use_view_dirs,
        pe_position=config.pe_position,
        pe_direction=config.pe_direction,
    )
    decoder = ProgressiveDecoder(
        init_rng, in_channels=config.feature_dim, w_dim=config.w_dim,
        channels=dict(config.decoder_channels),
    )
    discriminator = ProgressiveDiscriminator(init_rng, channels=dict(config.disc_channels))

    g_params = mapping.parameters() + radiance.parameters() + decoder.parameters()
    opt_g = Adam(g_params, config.adam_beta1, config.adam_beta2, config.adam_eps)
    opt_d = Adam(discriminator.parameters(), config.adam_beta1, config.adam_beta2,
                 config.adam_eps)

    return TrainState(
        config=config,
        mapping=mapping,
        field=radiance,
        decoder=decoder,
        discriminator=discriminator,
        opt_g=opt_g,
        opt_d=opt_d,
        rng=np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0]),
        dataset=build_dataset(config) if with_dataset else None,
    )
