"""Binary checkpoint format

Layout (little endian):
    b"MVCG" | u32 version | u32 meta length | meta JSON |
    u32 array count | per array: u32 name length, name, u32 ndim, u32 dims..., float32 data
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Any, BinaryIO

import numpy as np

from ..config import ConfigError, build_config
from .exceptions import CheckpointError
from .optimizer import Adam
from .state import TrainState, build_state

MAGIC = b"MVCG"
FORMAT_VERSION = 1

_U32 = struct.Struct("<I")


def _optimizer_arrays(prefix: str, opt: Adam, names: list[str]) -> dict[str, np.ndarray]:
    arrays: dict[str, np.ndarray] = {}
    for name, m, v in zip(names, opt.state.m, opt.state.v):
        arrays[f"{prefix}.m.{name}"] = m
        arrays[f"{prefix}.v.{name}"] = v
    return arrays


def _param_names(state: TrainState) -> tuple[list[str], list[str]]:
    g_names: list[str] = []
    for prefix, net in state.generator_networks().items():
        g_names.extend(name for name, _ in net.named_parameters(f"{prefix}."))
    d_names = [name for name, _ in state.discriminator.named_parameters("d.")]
    return g_names, d_names


def state_arrays(state: TrainState) -> dict[str, np.ndarray]:
    """Every named array a checkpoint stores, in manifest order"""
    arrays = {name: param.data for name, param in state.named_parameters()}
    g_names, d_names = _param_names(state)
    arrays.update(_optimizer_arrays("opt_g", state.opt_g, g_names))
    arrays.update(_optimizer_arrays("opt_d", state.opt_d, d_names))
    return arrays


def _meta(state: TrainState) -> dict[str, Any]:
    phase = state.phase
    return {
        "version": FORMAT_VERSION,
        "config": state.config.snapshot(),
        "step": state.step,
        "stage": phase.stage,
        "resolution": phase.resolution,
        "fade_alpha": phase.fade_alpha,
        "rng_state": state.rng.bit_generator.state,
        "dataset_state": None if state.dataset is None else state.dataset.state_dict(),
        "opt_g_step": state.opt_g.state.step,
        "opt_d_step": state.opt_d.state.step,
    }


def _write_array(fh: BinaryIO, name: str, array: np.ndarray) -> None:
    encoded = name.encode("utf-8")
    fh.write(_U32.pack(len(encoded)))
    fh.write(encoded)
    fh.write(_U32.pack(array.ndim))
    for dim in array.shape:
        fh.write(_U32.pack(dim))
    fh.write(np.ascontiguousarray(array, dtype="<f4").tobytes())


def save_checkpoint(state: TrainState, path: str | Path) -> Path:
    """
    Write the full training state atomically

    The file is written to a temporary sibling and renamed into place, so an
    interrupted save never leaves a partial checkpoint at path.

    Args:
        state: State to persist
        path: Destination file

    Returns:
        The written path

    Raises:
        CheckpointError: If the file cannot be written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = json.dumps(_meta(state)).encode("utf-8")
    arrays = state_arrays(state)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(MAGIC)
            fh.write(_U32.pack(FORMAT_VERSION))
            fh.write(_U32.pack(len(meta)))
            fh.write(meta)
            fh.write(_U32.pack(len(arrays)))
            for name, array in arrays.items():
                _write_array(fh, name, array)
        os.replace(tmp, path)
    except OSError as e:
        Path(tmp).unlink(missing_ok=True)
        raise CheckpointError(f"cannot write checkpoint {path}: {e}") from e
    return path


class _Reader:
    def __init__(self, buffer: bytes, source: Path):
        self.buffer = buffer
        self.offset = 0
        self.source = source

    def take(self, n: int) -> bytes:
        end = self.offset + n
        if end > len(self.buffer):
            raise CheckpointError(f"checkpoint {self.source} is truncated at byte {self.offset}")
        chunk = self.buffer[self.offset : end]
        self.offset = end
        return chunk

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]


def read_checkpoint(path: str | Path) -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    """
    Parse a checkpoint into its metadata and named arrays

    Raises:
        CheckpointError: On missing file, bad magic, unsupported version or
            truncation
    """
    path = Path(path)
    try:
        buffer = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e

    reader = _Reader(buffer, path)
    if reader.take(4) != MAGIC:
        raise CheckpointError(f"{path} is not a checkpoint (bad magic)")
    version = reader.u32()
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"checkpoint {path} has format version {version}; this build reads {FORMAT_VERSION}"
        )
    try:
        meta = json.loads(reader.take(reader.u32()).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"checkpoint {path} has corrupt metadata: {e}") from e

    arrays: dict[str, np.ndarray] = {}
    for _ in range(reader.u32()):
        name = reader.take(reader.u32()).decode("utf-8")
        shape = tuple(reader.u32() for _ in range(reader.u32()))
        count = int(np.prod(shape, dtype=np.int64))
        data = np.frombuffer(reader.take(4 * count), dtype="<f4").reshape(shape)
        if name in arrays:
            raise CheckpointError(f"checkpoint {path} repeats array {name!r}")
        arrays[name] = data.astype(np.float32)
    if reader.offset != len(buffer):
        raise CheckpointError(f"checkpoint {path} has {len(buffer) - reader.offset} trailing bytes")
    return meta, arrays


def read_manifest(path: str | Path) -> list[str]:
    """Array names stored in a checkpoint, in file order"""
    _, arrays = read_checkpoint(path)
    return list(arrays)


def _restore_optimizer(opt: Adam, prefix: str, names: list[str],
                       arrays: dict[str, np.ndarray], step: int) -> None:
    for i, name in enumerate(names):
        opt.state.m[i] = arrays[f"{prefix}.m.{name}"].copy()
        opt.state.v[i] = arrays[f"{prefix}.v.{name}"].copy()
    opt.state.step = step


def load_checkpoint(path: str | Path, with_dataset: bool = True) -> TrainState:
    """
    Rebuild a TrainState that continues exactly where save_checkpoint left off

    Args:
        path: Checkpoint file
        with_dataset: Rebuild and restore the image source (off for inference)

    Returns:
        Restored TrainState

    Raises:
        CheckpointError: If the file is unreadable or does not match its config
    """
    meta, arrays = read_checkpoint(path)
    try:
        config = build_config(meta["config"], str(path))
    except (KeyError, ConfigError) as e:
        raise CheckpointError(f"checkpoint {path} carries an unusable config: {e}") from e

    state = build_state(config, with_dataset=with_dataset)
    try:
        for prefix, net in state.networks().items():
            net.load_state_dict(arrays, f"{prefix}.")
        g_names, d_names = _param_names(state)
        _restore_optimizer(state.opt_g, "opt_g", g_names, arrays, int(meta["opt_g_step"]))
        _restore_optimizer(state.opt_d, "opt_d", d_names, arrays, int(meta["opt_d_step"]))
        state.step = int(meta["step"])
        state.rng.bit_generator.state = meta["rng_state"]
        if state.dataset is not None and meta.get("dataset_state") is not None:
            state.dataset.load_state_dict(meta["dataset_state"])
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"checkpoint {path} does not match its config: {e}") from e
    return state
