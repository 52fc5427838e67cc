"""Tests for config parsing and validation"""

from pathlib import Path

import pytest

from src.config import (
    ConfigError,
    TrainConfig,
    build_config,
    load_config,
    parse_config_text,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def test_parse_flat_text():
    """Test values are read as JSON with sections nested and comments dropped"""
    data = parse_config_text(
        "# run\n"
        "seed = 3\n"
        "resolutions = [8, 16]\n"
        "train.batch_size = 4   # per step\n"
        "pose.preset = ffhq\n"
        "mixup.enabled = off\n"
        "output_dir = runs/x\n"
    )
    assert data == {
        "seed": 3,
        "resolutions": [8, 16],
        "batch_size": 4,
        "pose": {"preset": "ffhq"},
        "mixup": {"enabled": False},
        "output_dir": "runs/x",
    }


@pytest.mark.parametrize(
    "text, message",
    [
        ("seed = 1\nseed = 2", "duplicate key"),
        ("model.width = 4", "unknown config section"),
        ("just words", "expected 'key = value'"),
        (" = 4", "empty key"),
    ],
)
def test_parse_errors(text, message):
    """Test malformed lines, duplicates and unknown sections"""
    with pytest.raises(ConfigError, match=message):
        parse_config_text(text)


def test_profiles_fill_unset_keys():
    """Test desk and paper profiles supply schedule and sizes"""
    desk = build_config({})
    assert desk.resolutions == [32, 64]
    assert desk.batch_size == 8
    assert desk.total_steps == 40000
    # the field may be narrow but the composited feature keeps its full width
    assert desk.field_width == 64
    assert desk.feature_dim == 256
    assert desk.decoder_channels == {32: 256, 64: 128}
    assert build_config({"seed": 1}).feature_dim == 256
    paper = build_config({"profile": "paper"})
    assert paper.resolutions == [64, 128, 256, 512]
    assert paper.batch_size == 56
    assert paper.base_resolution == 64
    assert paper.total_steps == 50000 + 3 * 20000


def test_explicit_keys_override_profile():
    """Test caller keys win over profile values"""
    config = build_config({"profile": "paper", "batch_size": 4})
    assert config.batch_size == 4
    assert config.stage1_steps == 50000


def test_pose_preset_overrides_spreads():
    """Test a named preset sets the distribution kind and spreads"""
    config = build_config({"pose": {"preset": "afhqv2", "h_spread": 1.0}})
    assert (config.pose.kind, config.pose.h_spread, config.pose.v_spread) == ("uniform", 0.4, 0.2)


@pytest.mark.parametrize(
    "data",
    [
        {"resolutions": [32, 96], "decoder_channels": {32: 4, 96: 4},
         "disc_channels": {32: 4, 96: 4}},
        {"resolutions": [16, 32]},
        {"near": 1.2, "far": 1.0},
        {"adam_beta2": 1.0},
        {"batch_size": 0},
        {"learning_rate": 0.1},
        {"pose": {"preset": "lsun"}},
        {"scene": {"kind": "teapot"}},
    ],
)
def test_invalid_configs(data):
    """Test validation failures surface as ConfigError"""
    with pytest.raises(ConfigError, match="invalid config"):
        build_config(data)


def test_snapshot_round_trip():
    """Test a snapshot rebuilds an equal config"""
    config = build_config({"seed": 5, "pose": {"preset": "celebahq"}, "background": [1, 1, 1]})
    assert build_config(config.snapshot()) == config


def test_flat_params_use_dotted_sections():
    """Test nested sections flatten to dotted keys"""
    flat = build_config({}).flat_params()
    assert flat["pose.kind"] == "gaussian"
    assert flat["loss.reproj_weight"] == 1.0
    assert "pose" not in flat


def test_load_config_with_overrides(tmp_path):
    """Test files load with later overrides applied"""
    path = tmp_path / "run.conf"
    path.write_text("seed = 1\nstage1_steps = 10\n", encoding="utf-8")
    config = load_config(path, overrides={"seed": 7})
    assert isinstance(config, TrainConfig)
    assert (config.seed, config.stage1_steps) == (7, 10)


def test_load_config_missing_file(tmp_path):
    """Test a missing file raises ConfigError"""
    with pytest.raises(ConfigError, match="config file not found"):
        load_config(tmp_path / "nope.conf")


@pytest.mark.parametrize("name", ["desk.conf", "smoke.conf", "ablation.conf"])
def test_shipped_configs_validate(name):
    """Test every config in configs/ is valid"""
    config = load_config(CONFIG_DIR / name)
    assert config.total_steps > 0
