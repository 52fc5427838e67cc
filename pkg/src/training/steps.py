"""One alternating D/G iteration for each training stage"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..engine import NonFiniteError, Tensor, no_grad, stack
from ..geometry import CameraPose, sample_pose
from ..objectives import (
    LossReport,
    gan_d_loss,
    gan_g_loss,
    image_reproj_loss,
    mrf_loss,
    r1_penalty,
)
from ..pipelines import area_downsample
from ..stereo import StereoPair, build_stereo_pair
from .exceptions import NonFiniteLossError
from .optimizer import lr_schedule
from .state import TrainState, render_options


@dataclass
class FakeBatch:
    """Generated pairs of one half-iteration, stacked along the batch axis"""

    pairs: list[StereoPair]
    w: Tensor  # [B, w_dim]
    eta: float

    @property
    def valid(self) -> np.ndarray:
        return np.stack([p.valid for p in self.pairs])

    @property
    def valid_fraction(self) -> float:
        return float(np.mean([p.valid_fraction for p in self.pairs]))

    def stacked(self, attr: str) -> Tensor:
        return stack([_pick(p, attr) for p in self.pairs])


def _pick(pair: StereoPair, attr: str) -> Tensor:
    return {
        "mixed": pair.mixed,
        "primary_color": pair.primary.color,
        "warped_color": pair.warped_color,
        "primary_feature": pair.primary.feature,
        "warped_feature": pair.warped_feature,
    }[attr]


def to_signed(images: Tensor | np.ndarray) -> Tensor | np.ndarray:
    """Map [0, 1] images to the [-1, 1] range the discriminator sees"""
    return images * 2.0 - 1.0


def _draw(state: TrainState, rng: np.random.Generator
          ) -> tuple[np.ndarray, list[CameraPose], list[CameraPose]]:
    config = state.config
    if config.fixed_pair:
        fixed = state.fixed_draw
        return fixed.z, fixed.primary, fixed.auxiliary
    batch = config.batch_size
    z = rng.standard_normal((batch, config.z_dim))
    dist = state.pose_dist
    primary = [sample_pose(dist, rng) for _ in range(batch)]
    auxiliary = [sample_pose(dist, rng) for _ in range(batch)]
    return z, primary, auxiliary


def _draw_eta(state: TrainState, rng: np.random.Generator) -> float | None:
    """Shared eta of the batch; None lets every pair draw its own"""
    mixup = state.config.mixup
    if not mixup.enabled:
        return 1.0
    if mixup.per_sample:
        return None
    return float(rng.random())


def generate_pairs(state: TrainState, rng: np.random.Generator, stage: int) -> FakeBatch:
    """
    Render a batch of stereo pairs from fresh latents and poses

    Draw order: latents, primary poses, auxiliary poses, eta, then per pair
    the primary and auxiliary sample offsets.
    """
    z, primary, auxiliary = _draw(state, rng)
    eta = _draw_eta(state, rng)
    w = state.mapping(z)
    K = state.intrinsics()
    options = render_options(state.config, want_feature=stage == 2)
    pairs = [
        build_stereo_pair(state.field, w[i], primary[i], auxiliary[i], K, options, rng,
                          stage=stage, eta=eta)
        for i in range(len(primary))
    ]
    used = float(np.mean([p.eta for p in pairs]))
    return FakeBatch(pairs, w, used)


def _fake_images(state: TrainState, fakes: FakeBatch, stage: int) -> Tensor:
    """Discriminator input in [-1, 1] at the current resolution"""
    mixed = fakes.stacked("mixed")
    if stage == 1:
        return to_signed(mixed)
    phase = state.phase
    return state.decoder(mixed, fakes.w, phase.resolution, phase.fade_alpha)


def _real_images(state: TrainState, real_batch: np.ndarray) -> np.ndarray:
    resolution = state.phase.resolution
    images = area_downsample(np.asarray(real_batch, dtype=np.float64), resolution)
    return to_signed(images)


def _abort(state: TrainState, stage: int, components: dict[str, float], eta: float | None,
           cause: Exception | str) -> NonFiniteLossError:
    return NonFiniteLossError(
        f"non-finite loss at step {state.step} (stage {stage}): {cause}",
        step=state.step, stage=stage, components=components, eta=eta,
    )


def _discriminator_step(state: TrainState, real: np.ndarray, rng: np.random.Generator,
                        stage: int, components: dict[str, float]) -> None:
    config = state.config
    phase = state.phase
    D = state.discriminator

    with no_grad():
        try:
            fakes = generate_pairs(state, rng, stage)
        except NonFiniteError as e:
            raise _abort(state, stage, components, None, e) from e
        fake = _fake_images(state, fakes, stage).detach()

    def score(x: Tensor) -> Tensor:
        return D(x, phase.resolution, phase.fade_alpha)

    d_real = score(Tensor(real))
    d_fake = score(fake)
    try:
        # the input-gradient tape inside R1 fails first on non-finite scores
        r1 = r1_penalty(score, real, D.parameters())
        components["r1"] = float(r1.data.mean())
        loss = gan_d_loss(d_real, d_fake, r1, config.lambda_r1)
        components["d_adv"] = loss.item() - config.lambda_r1 * components["r1"]
        state.opt_d.zero_grad()
        loss.backward()
    except NonFiniteError as e:
        raise _abort(state, stage, components, fakes.eta, e) from e
    lr = lr_schedule(state.step, config.total_steps, config.lr_d, config.lr_d_final)
    state.opt_d.step(lr)
    state.opt_d.zero_grad()


def _generator_step(state: TrainState, rng: np.random.Generator, stage: int,
                    components: dict[str, float]) -> FakeBatch:
    config = state.config
    phase = state.phase
    try:
        fakes = generate_pairs(state, rng, stage)
    except NonFiniteError as e:
        raise _abort(state, stage, components, None, e) from e

    if stage == 1:
        consistency = image_reproj_loss(
            fakes.stacked("primary_color"), fakes.stacked("warped_color"), fakes.valid,
            config.mu_ssim,
        )
        components["reproj"] = consistency.item()
    else:
        try:
            consistency = mrf_loss(
                fakes.stacked("primary_feature"), fakes.stacked("warped_feature"), fakes.valid
            )
        except ValueError as e:
            print(f"Warning: MRF loss skipped at step {state.step}: {e}")
            consistency = Tensor(0.0)
        components["mrf"] = consistency.item()

    if config.loss.adversarial:
        d_fake = state.discriminator(_fake_images(state, fakes, stage), phase.resolution,
                                     phase.fade_alpha)
        loss = gan_g_loss(d_fake, consistency, config.loss.reproj_weight)
        components["g_adv"] = loss.item() - config.loss.reproj_weight * consistency.item()
    else:
        loss = consistency * config.loss.reproj_weight

    if not loss.requires_grad:
        print(f"Warning: generator loss has no gradient at step {state.step}; update skipped")
        return fakes
    try:
        state.opt_g.zero_grad()
        loss.backward()
    except NonFiniteError as e:
        raise _abort(state, stage, components, fakes.eta, e) from e
    lr = lr_schedule(state.step, config.total_steps, config.lr_g, config.lr_g_final)
    state.opt_g.step(lr)
    state.opt_g.zero_grad()
    state.discriminator.zero_grad()
    return fakes


def _train_step(state: TrainState, real_batch: np.ndarray, rng: np.random.Generator,
                stage: int) -> LossReport:
    if state.stage != stage:
        raise RuntimeError(f"step {state.step} belongs to stage {state.stage}, not {stage}")
    components: dict[str, float] = {}
    if state.config.loss.adversarial:
        _discriminator_step(state, _real_images(state, real_batch), rng, stage, components)
    fakes = _generator_step(state, rng, stage, components)

    report = LossReport.build(
        step=state.step,
        stage=stage,
        components=components,
        eta=fakes.eta,
        valid_fraction=fakes.valid_fraction,
        lambda_r1=state.config.lambda_r1,
        reproj_weight=state.config.loss.reproj_weight,
    )
    if not report.is_finite():
        raise _abort(state, stage, components, fakes.eta, "loss components are not finite")
    state.step += 1
    return report


def train_step_stage1(state: TrainState, real_batch: np.ndarray,
                      rng: np.random.Generator | None = None) -> LossReport:
    """
    Image-level iteration: D-step then G-step on fresh draws

    The D-step scores mixed renders against the real batch with the R1
    penalty; the G-step minimizes the adversarial term plus the image
    re-projection loss between primary renders and warped auxiliaries.

    Args:
        state: Training state in stage 1; advanced by one step
        real_batch: Real images [B, 3, H, W] in [0, 1], any multiple of the
            base resolution
        rng: Generator for latents, poses, eta and ray offsets; defaults to
            the state's own

    Returns:
        LossReport with g_adv, d_adv, r1 and reproj

    Raises:
        NonFiniteLossError: If any loss is NaN or infinite
    """
    return _train_step(state, real_batch, rng or state.rng, stage=1)


def train_step_stage2(state: TrainState, real_batch: np.ndarray,
                      rng: np.random.Generator | None = None) -> LossReport:
    """
    Feature-level iteration: features are rendered at the base resolution,
    warped and mixed, then decoded at the current resolution with the
    current fade coefficient

    Returns:
        LossReport with g_adv, d_adv, r1 and mrf

    Raises:
        NonFiniteLossError: If any loss is NaN or infinite
    """
    return _train_step(state, real_batch, rng or state.rng, stage=2)


def train_step(state: TrainState, real_batch: np.ndarray,
               rng: np.random.Generator | None = None) -> LossReport:
    """Dispatch to the stage the current step belongs to"""
    if state.stage == 1:
        return train_step_stage1(state, real_batch, rng)
    return train_step_stage2(state, real_batch, rng)
