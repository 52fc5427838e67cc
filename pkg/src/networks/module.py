"""Parameter containers and the layers shared by every network"""

from __future__ import annotations

from collections.abc import Iterator
from typing import Any

import numpy as np

from ..engine import Tensor, conv2d
from ..engine.exceptions import ShapeError


class Module:
    """
    Base class holding named parameters and child modules

    Parameter names are dotted paths (``layer0.weight``) in registration
    order; the order is part of the checkpoint format.
    """

    def __init__(self) -> None:
        self._parameters: dict[str, Tensor] = {}
        self._children: dict[str, Module] = {}

    def add_parameter(self, name: str, value: np.ndarray) -> Tensor:
        param = Tensor(value, requires_grad=True, name=name)
        self._parameters[name] = param
        return param

    def add_module(self, name: str, module: Module) -> Module:
        self._children[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for name, param in self._parameters.items():
            yield f"{prefix}{name}", param
        for child_name, child in self._children.items():
            yield from child.named_parameters(f"{prefix}{child_name}.")

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.grad = None

    def state_dict(self, prefix: str = "") -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters(prefix)}

    def load_state_dict(self, state: dict[str, np.ndarray], prefix: str = "") -> None:
        """
        Copy arrays into the parameters

        Raises:
            KeyError: If a parameter is missing from state
            ShapeError: If a stored array has the wrong shape
        """
        for name, param in self.named_parameters(prefix):
            if name not in state:
                raise KeyError(f"missing parameter {name}")
            value = np.asarray(state[name])
            if value.shape != param.shape:
                raise ShapeError(f"{name}: expected shape {param.shape}, got {value.shape}")
            param.data = value.astype(param.data.dtype, copy=True)

    def astype(self, dtype: Any) -> Module:
        """Cast every parameter in place (float64 for gradient checks)"""
        for param in self.parameters():
            param.data = param.data.astype(dtype)
        return self

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        return self.forward(*args, **kwargs)

    def forward(self, *args: Any, **kwargs: Any) -> Any:
        raise NotImplementedError


class Linear(Module):
    """x @ W + b with W stored as [in, out]"""

    def __init__(
        self,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        bound: float | None = None,
        bias_init: float | None = None,
    ):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        if bound is None:
            weight = rng.normal(0.0, np.sqrt(2.0 / in_features), (in_features, out_features))
        else:
            weight = rng.uniform(-bound, bound, (in_features, out_features))
        self.weight = self.add_parameter("weight", weight)
        if bias_init is None:
            bias = np.zeros(out_features) if bound is None else rng.uniform(-bound, bound, out_features)
        else:
            bias = np.full(out_features, bias_init)
        self.bias = self.add_parameter("bias", bias)

    def forward(self, x: Tensor) -> Tensor:
        return x @ self.weight + self.bias


class Conv2d(Module):
    """Same-padded convolution with He-normal weights"""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 rng: np.random.Generator):
        super().__init__()
        fan_in = in_channels * kernel_size * kernel_size
        self.weight = self.add_parameter(
            "weight",
            rng.normal(0.0, np.sqrt(2.0 / fan_in),
                       (out_channels, in_channels, kernel_size, kernel_size)),
        )
        self.bias = self.add_parameter("bias", np.zeros(out_channels))

    def forward(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, padding="same") + self.bias.reshape(-1, 1, 1)
