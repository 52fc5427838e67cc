"""Configuration management using Pydantic Settings and validated training configs"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import StereoGanError
from .geometry import POSE_PRESETS


class ConfigError(StereoGanError):
    """Raised when a config file is missing, malformed or fails validation"""

    pass


class Settings(BaseSettings):
    """Process-level settings read from the environment or .env"""

    # MLflow Configuration
    mlflow_tracking_uri: str = "file:./mlruns"
    experiment_name: str = "stereo-radiance-gan"

    # Monitoring Configuration
    pushgateway_url: str = "http://localhost:9091"
    push_metrics: bool = False
    tracing_enabled: bool = False
    tracing_service_name: str = "stereo-radiance-gan"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PoseConfig(_Section):
    preset: str | None = None
    kind: Literal["gaussian", "uniform"] = "gaussian"
    h_spread: float = 0.3
    v_spread: float = 0.155

    @model_validator(mode="after")
    def _apply_preset(self) -> PoseConfig:
        if self.preset is None:
            return self
        key = self.preset.lower()
        if key not in POSE_PRESETS:
            raise ValueError(f"unknown pose preset {self.preset!r}; choose from {sorted(POSE_PRESETS)}")
        kind, h_spread, v_spread = POSE_PRESETS[key]
        self.kind = kind
        self.h_spread = h_spread
        self.v_spread = v_spread
        return self


class SceneConfig(_Section):
    kind: Literal["textured_sphere", "textured_plane", "two_tone_blob"] = "textured_sphere"
    seed: int = 0
    count: int = 2000
    shading: bool = True


class MixupConfig(_Section):
    enabled: bool = True
    per_sample: bool = False


class LossConfig(_Section):
    reproj_weight: float = 1.0
    adversarial: bool = True


PROFILES: dict[str, dict[str, Any]] = {
    "desk": {
        "batch_size": 8,
        "stage1_steps": 20000,
        "stage2_steps_per_resolution": 20000,
        "fade_steps": 2000,
        "resolutions": [32, 64],
        "field_width": 64,
        "feature_dim": 256,
        "decoder_channels": {32: 256, 64: 128},
        "disc_channels": {32: 32, 64: 16},
    },
    "paper": {
        "batch_size": 56,
        "stage1_steps": 50000,
        "stage2_steps_per_resolution": 20000,
        "fade_steps": 2000,
        "resolutions": [64, 128, 256, 512],
        "field_width": 256,
        "feature_dim": 256,
        "decoder_channels": {64: 256, 128: 128, 256: 64, 512: 32},
        "disc_channels": {64: 256, 128: 128, 256: 64, 512: 32},
    },
}


class TrainConfig(BaseModel):
    """
    Every key of a training run

    Profile values fill any key the caller does not set explicitly.
    """

    model_config = ConfigDict(extra="forbid")

    profile: Literal["desk", "paper"] = "desk"
    seed: int = 0

    # schedule
    stage1_steps: int = 20000
    stage2_steps_per_resolution: int = 20000
    fade_steps: int = 2000
    resolutions: list[int] = [32, 64]
    batch_size: int = 8

    # optimizer
    lr_g: float = 6.0e-5
    lr_d: float = 2.0e-4
    lr_g_final: float = 1.5e-5
    lr_d_final: float = 5.0e-5
    adam_beta1: float = 0.0
    adam_beta2: float = 0.9
    adam_eps: float = 1e-8

    # objectives
    lambda_r1: float = 10.0
    mu_ssim: float = 0.85

    # camera and rendering
    fov_deg: float = 12.0
    radius: float = 1.0
    near: float = 0.88
    far: float = 1.12
    samples_per_ray: int = 12
    background: tuple[float, float, float] | None = None

    # networks
    z_dim: int = 256
    w_dim: int = 256
    field_width: int = 64
    field_layers: int = 8
    feature_dim: int = 256
    use_view_dirs: bool = True
    pe_position: int = 0
    pe_direction: int = 0
    decoder_channels: dict[int, int] = {32: 256, 64: 128}
    disc_channels: dict[int, int] = {32: 32, 64: 16}

    # data
    dataset: str | None = None

    # switches
    fixed_pair: bool = False

    # cadence and outputs
    checkpoint_every: int = 1000
    log_every: int = 1
    output_dir: str = "runs/default"

    pose: PoseConfig = PoseConfig()
    scene: SceneConfig = SceneConfig()
    mixup: MixupConfig = MixupConfig()
    loss: LossConfig = LossConfig()

    @model_validator(mode="before")
    @classmethod
    def _fill_profile(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        profile = data.get("profile", "desk")
        if profile not in PROFILES:
            return data
        return {**PROFILES[profile], **data}

    @model_validator(mode="after")
    def _check(self) -> TrainConfig:
        if not self.resolutions:
            raise ValueError("resolutions must not be empty")
        for lo, hi in zip(self.resolutions, self.resolutions[1:]):
            if hi != 2 * lo:
                raise ValueError(f"resolutions must strictly double, got {self.resolutions}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be at least 1, got {self.batch_size}")
        for name in ("adam_beta1", "adam_beta2"):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise ValueError(f"{name} must be in [0, 1), got {value}")
        if not 0 < self.near < self.far:
            raise ValueError(f"need 0 < near < far, got near={self.near}, far={self.far}")
        if self.samples_per_ray < 1:
            raise ValueError(f"samples_per_ray must be at least 1, got {self.samples_per_ray}")
        for name in ("decoder_channels", "disc_channels"):
            keys = sorted(getattr(self, name))
            if keys != sorted(self.resolutions):
                raise ValueError(f"{name} keys {keys} must match resolutions {self.resolutions}")
        if self.fade_steps < 0 or self.stage1_steps < 0 or self.stage2_steps_per_resolution < 0:
            raise ValueError("step counts must be non-negative")
        return self

    @property
    def base_resolution(self) -> int:
        return self.resolutions[0]

    @property
    def total_steps(self) -> int:
        return self.stage1_steps + self.stage2_steps_per_resolution * (len(self.resolutions) - 1)

    def snapshot(self) -> dict[str, Any]:
        """JSON-safe dump used by checkpoints and MLflow"""
        return self.model_dump(mode="json")

    def flat_params(self) -> dict[str, Any]:
        """Dotted key -> value view for experiment tracking"""
        flat: dict[str, Any] = {}
        for key, value in self.snapshot().items():
            if isinstance(value, dict) and key in {"pose", "scene", "mixup", "loss"}:
                for sub, sub_value in value.items():
                    flat[f"{key}.{sub}"] = sub_value
            else:
                flat[key] = value
        return flat


SECTIONS = {"pose", "scene", "mixup", "loss"}


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        lowered = raw.lower()
        if lowered in {"true", "yes", "on"}:
            return True
        if lowered in {"false", "no", "off"}:
            return False
        if lowered in {"none", "null"}:
            return None
        return raw.strip("\"'")


def parse_config_text(text: str, source: str = "<string>") -> dict[str, Any]:
    """
    Parse flat ``key = value`` text into nested config data

    Values are read as JSON when possible (numbers, lists, objects) and as
    plain strings otherwise. ``train.`` is accepted as a prefix for top-level
    keys.

    Raises:
        ConfigError: On malformed lines or duplicate keys
    """
    data: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key.startswith("train."):
            key = key[len("train."):]
        value = _parse_value(raw)
        if "." in key:
            section, sub = key.split(".", 1)
            if section not in SECTIONS:
                raise ConfigError(f"{source}:{lineno}: unknown config section {section!r}")
            target = data.setdefault(section, {})
        else:
            target, sub = data, key
        if sub in target:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        target[sub] = value
    return data


def build_config(data: dict[str, Any], source: str = "<config>") -> TrainConfig:
    """Validate config data, mapping pydantic errors to ConfigError"""
    try:
        return TrainConfig(**data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"{source}: invalid config: {problems}") from e


def load_config(path: str | Path, overrides: dict[str, Any] | None = None) -> TrainConfig:
    """
    Load and validate a training config file

    Args:
        path: Flat key-value config file
        overrides: Extra top-level keys applied after the file (e.g. seed)

    Returns:
        Validated TrainConfig

    Raises:
        ConfigError: If the file is missing, unreadable or invalid
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    data = parse_config_text(text, str(path))
    data.update(overrides or {})
    return build_config(data, str(path))
