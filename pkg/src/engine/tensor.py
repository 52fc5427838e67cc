"""Dense tensors with reverse-mode automatic differentiation

Every operation is a `Function` subclass. Calling `Function.apply` runs the
forward pass on the underlying numpy buffers and, when any input requires a
gradient, links the output tensor back to the function instance. The tape is
rebuilt on every forward pass; `Tensor.backward` walks it once in reverse
topological order and then releases it.
"""

from __future__ import annotations

import contextlib
from collections.abc import Iterator, Sequence
from typing import Any

import numpy as np
from scipy import special

from .exceptions import GraphError, NonFiniteError, ShapeError

_DEFAULT_DTYPE: type = np.float32
_GRAD_ENABLED = True


def get_default_dtype() -> type:
    """Return the floating point type new tensors are created with"""
    return _DEFAULT_DTYPE


@contextlib.contextmanager
def precision(dtype: str | type = "float64") -> Iterator[None]:
    """
    Temporarily switch the dtype of newly created tensors

    The 64-bit mode exists for gradient checks; training runs in 32-bit.

    Args:
        dtype: numpy floating point type or its name
    """
    global _DEFAULT_DTYPE
    previous = _DEFAULT_DTYPE
    _DEFAULT_DTYPE = np.dtype(dtype).type
    try:
        yield
    finally:
        _DEFAULT_DTYPE = previous


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Disable tape recording, e.g. for inference renders"""
    global _GRAD_ENABLED
    previous = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = previous


def _is_basic_index(index: Any) -> bool:
    items = index if isinstance(index, tuple) else (index,)
    return all(isinstance(i, (slice, int, type(None), type(Ellipsis))) for i in items)


class Function:
    """Base class for differentiable operations"""

    def __init__(self, *inputs: Tensor):
        self.inputs = inputs
        self.saved: dict[str, Any] = {}
        self.released = False

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no forward pass")

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        """
        Map the output gradient to one gradient per input

        Returned gradients may still carry broadcast dimensions; the graph
        sums them back to the input shapes.
        """
        raise NotImplementedError(f"{type(self).__name__} has no backward pass")

    @classmethod
    def apply(cls, *inputs: Any, **kwargs: Any) -> Tensor:
        """
        Run the forward pass and record it on the tape when needed

        Args:
            *inputs: Tensors or array-likes (promoted to constant tensors)
            **kwargs: Static arguments passed to `forward`

        Returns:
            Output tensor
        """
        tensors = tuple(as_tensor(x) for x in inputs)
        fn = cls(*tensors)
        data = fn.forward(*(t.data for t in tensors), **kwargs)
        requires_grad = _GRAD_ENABLED and any(t.requires_grad for t in tensors)
        out = Tensor(data, requires_grad=requires_grad)
        if requires_grad:
            out.creator = fn
        return out

    def release(self) -> None:
        """Drop saved forward values; the node can no longer be differentiated"""
        self.saved.clear()
        self.released = True

    @staticmethod
    def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
        """
        Sum out broadcast dimensions so that grad matches shape

        Args:
            grad: Gradient that may carry broadcast dimensions
            shape: Target shape of the input the gradient belongs to

        Returns:
            Gradient reduced to `shape`
        """
        if grad.shape == shape:
            return grad
        while grad.ndim > len(shape):
            grad = grad.sum(axis=0)
        for axis, size in enumerate(shape):
            if size == 1 and grad.shape[axis] != 1:
                grad = grad.sum(axis=axis, keepdims=True)
        return grad.reshape(shape)


class Graph:
    """Topologically ordered record of the operations behind one output"""

    def __init__(self, nodes: list[Tensor]):
        self.nodes = nodes

    @classmethod
    def from_root(cls, root: Tensor) -> Graph:
        """
        Collect every tensor that contributes to root, parents first

        Raises:
            GraphError: If any node on the tape was already differentiated
        """
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            fn = node.creator
            if fn is None:
                continue
            if fn.released:
                raise GraphError(
                    "backward() called twice on the same tape; run a new forward pass first"
                )
            for parent in reversed(fn.inputs):
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return cls(order)

    def run(self, seed: np.ndarray) -> None:
        """Propagate seed from the last node back to the leaves"""
        pending: dict[int, np.ndarray] = {id(self.nodes[-1]): seed}
        for node in reversed(self.nodes):
            grad = pending.pop(id(node), None)
            if grad is None:
                continue
            fn = node.creator
            if fn is None:
                grad = np.asarray(grad, dtype=node.data.dtype)
                node.grad = grad.copy() if node.grad is None else node.grad + grad
                continue
            input_grads = fn.backward(grad)
            for parent, parent_grad in zip(fn.inputs, input_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                parent_grad = Function.unbroadcast(np.asarray(parent_grad), parent.shape)
                key = id(parent)
                pending[key] = parent_grad if key not in pending else pending[key] + parent_grad
            fn.release()


class Tensor:
    """
    Dense float array that may take part in a differentiation graph

    `data` is a numpy buffer in the current default dtype; `grad` is filled by
    `backward()` for leaves that require gradients.
    """

    __array_priority__ = 100

    def __init__(self, data: Any, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=_DEFAULT_DTYPE)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.creator: Function | None = None
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self.creator is None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}{flag})"

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def detach(self) -> Tensor:
        """Constant view of the same values, cut from the tape"""
        return Tensor(self.data)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.data)))

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """
        Populate grads of every leaf this scalar depends on

        Raises:
            ShapeError: If the tensor is not a scalar
            NonFiniteError: If the value is NaN or infinite
            GraphError: If there is no tape or it was already consumed
        """
        if self.data.size != 1:
            raise ShapeError(f"backward() needs a scalar loss, got shape {self.shape}")
        if not self.is_finite():
            raise NonFiniteError(f"loss is not finite: {self.item()}")
        if not self.requires_grad:
            raise GraphError("loss does not depend on any tensor that requires grad")
        graph = Graph.from_root(self)
        graph.run(np.ones_like(self.data))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: Any) -> Tensor:
        return Add.apply(self, other)

    def __radd__(self, other: Any) -> Tensor:
        return Add.apply(other, self)

    def __sub__(self, other: Any) -> Tensor:
        return Sub.apply(self, other)

    def __rsub__(self, other: Any) -> Tensor:
        return Sub.apply(other, self)

    def __mul__(self, other: Any) -> Tensor:
        return Mul.apply(self, other)

    def __rmul__(self, other: Any) -> Tensor:
        return Mul.apply(other, self)

    def __truediv__(self, other: Any) -> Tensor:
        return Div.apply(self, other)

    def __rtruediv__(self, other: Any) -> Tensor:
        return Div.apply(other, self)

    def __neg__(self) -> Tensor:
        return Neg.apply(self)

    def __pow__(self, exponent: Any) -> Tensor:
        return Pow.apply(self, exponent)

    def __matmul__(self, other: Any) -> Tensor:
        return MatMul.apply(self, other)

    def __rmatmul__(self, other: Any) -> Tensor:
        return MatMul.apply(other, self)

    def __getitem__(self, index: Any) -> Tensor:
        return GetItem.apply(self, index=index)

    # elementwise ----------------------------------------------------------
    def exp(self) -> Tensor:
        return Exp.apply(self)

    def log(self) -> Tensor:
        return Log.apply(self)

    def sin(self) -> Tensor:
        return Sin.apply(self)

    def cos(self) -> Tensor:
        return Cos.apply(self)

    def tanh(self) -> Tensor:
        return Tanh.apply(self)

    def sigmoid(self) -> Tensor:
        return Sigmoid.apply(self)

    def softplus(self) -> Tensor:
        return Softplus.apply(self)

    def leaky_relu(self, slope: float = 0.2) -> Tensor:
        return LeakyReLU.apply(self, slope=slope)

    def abs(self) -> Tensor:
        return Abs.apply(self)

    def sqrt(self) -> Tensor:
        return Pow.apply(self, 0.5)

    def clamp(self, low: float | None = None, high: float | None = None) -> Tensor:
        return Clamp.apply(self, low=low, high=high)

    # reductions -----------------------------------------------------------
    def sum(self, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:
        return Sum.apply(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:
        return Mean.apply(self, axis=axis, keepdims=keepdims)

    def max(self, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:
        return Extreme.apply(self, axis=axis, keepdims=keepdims, mode="max")

    def min(self, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:
        return Extreme.apply(self, axis=axis, keepdims=keepdims, mode="min")

    # shape ----------------------------------------------------------------
    def reshape(self, *shape: int | Sequence[int]) -> Tensor:
        if len(shape) == 1 and not isinstance(shape[0], int):
            shape = tuple(shape[0])
        return Reshape.apply(self, shape=shape)

    def transpose(self, *axes: int) -> Tensor:
        return Transpose.apply(self, axes=axes or None)

    def cumsum(self, axis: int) -> Tensor:
        return Cumsum.apply(self, axis=axis)

    def pad(self, widths: Sequence[tuple[int, int]], mode: str = "constant") -> Tensor:
        return Pad.apply(self, widths=tuple(widths), mode=mode)

    def broadcast_to(self, shape: Sequence[int]) -> Tensor:
        return BroadcastTo.apply(self, shape=tuple(shape))


def as_tensor(value: Any) -> Tensor:
    """Wrap scalars and arrays as constant tensors; pass tensors through"""
    return value if isinstance(value, Tensor) else Tensor(value)


# elementwise ---------------------------------------------------------------


class BinaryFunction(Function):
    """Two-operand elementwise operation with numpy broadcasting"""

    @classmethod
    def apply(cls, a: Any, b: Any, **kwargs: Any) -> Tensor:
        """
        Raises:
            ShapeError: If the operands do not broadcast
        """
        a_t, b_t = as_tensor(a), as_tensor(b)
        try:
            np.broadcast_shapes(a_t.shape, b_t.shape)
        except ValueError as e:
            raise ShapeError(f"shapes {a_t.shape} and {b_t.shape} do not broadcast") from e
        return super().apply(a_t, b_t, **kwargs)


class Add(BinaryFunction):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a + b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return grad, grad


class Sub(BinaryFunction):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a - b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return grad, -grad


class Mul(BinaryFunction):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.saved.update(a=a, b=b)
        return a * b

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return grad * self.saved["b"], grad * self.saved["a"]


class Div(BinaryFunction):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = a / b
        self.saved.update(b=b, out=out)
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        b, out = self.saved["b"], self.saved["out"]
        with np.errstate(divide="ignore", invalid="ignore"):
            return grad / b, -grad * out / b


class Neg(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        return -a

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (-grad,)


class Exp(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            out = np.exp(a)
        self.saved["out"] = out
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (grad * self.saved["out"],)


class Log(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.saved["a"] = a
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(a)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        with np.errstate(divide="ignore", invalid="ignore"):
            return (grad / self.saved["a"],)


class Sin(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.saved["a"] = a
        return np.sin(a)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (grad * np.cos(self.saved["a"]),)


class Cos(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.saved["a"] = a
        return np.cos(a)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (-grad * np.sin(self.saved["a"]),)


class Tanh(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        out = np.tanh(a)
        self.saved["out"] = out
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        out = self.saved["out"]
        return (grad * (1.0 - out * out),)


class Pow(BinaryFunction):
    def forward(self, a: np.ndarray, p: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.power(a, p)
        self.saved.update(a=a, p=p, out=out)
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        a, p, out = self.saved["a"], self.saved["p"], self.saved["out"]
        with np.errstate(divide="ignore", invalid="ignore"):
            grad_a = grad * p * np.power(a, p - 1)
            grad_p = None
            if self.inputs[1].requires_grad:
                grad_p = grad * out * np.log(np.where(a > 0, a, 1.0))
        return grad_a, grad_p


class Softplus(Function):
    """log(1 + exp(t)), computed without overflow"""

    def forward(self, a: np.ndarray) -> np.ndarray:
        self.saved["a"] = a
        return np.logaddexp(0.0, a).astype(a.dtype)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (grad * special.expit(self.saved["a"]),)


class Sigmoid(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        out = special.expit(a)
        self.saved["out"] = out
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        out = self.saved["out"]
        return (grad * out * (1.0 - out),)


class LeakyReLU(Function):
    def forward(self, a: np.ndarray, slope: float = 0.2) -> np.ndarray:
        positive = a > 0
        self.saved.update(positive=positive, slope=slope)
        return np.where(positive, a, a * slope)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (np.where(self.saved["positive"], grad, grad * self.saved["slope"]),)


class Abs(Function):
    def forward(self, a: np.ndarray) -> np.ndarray:
        self.saved["sign"] = np.sign(a)
        return np.abs(a)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (grad * self.saved["sign"],)


class Clamp(Function):
    def forward(
        self, a: np.ndarray, low: float | None = None, high: float | None = None
    ) -> np.ndarray:
        inside = np.ones(a.shape, dtype=bool)
        if low is not None:
            inside &= a >= low
        if high is not None:
            inside &= a <= high
        self.saved["inside"] = inside
        return np.clip(a, low, high)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (grad * self.saved["inside"],)


class Minimum(BinaryFunction):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.saved["take_a"] = a <= b
        return np.minimum(a, b)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        take_a = self.saved["take_a"]
        return grad * take_a, grad * ~take_a


class Maximum(BinaryFunction):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.saved["take_a"] = a >= b
        return np.maximum(a, b)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        take_a = self.saved["take_a"]
        return grad * take_a, grad * ~take_a


class Where(Function):
    def forward(self, a: np.ndarray, b: np.ndarray, condition: np.ndarray) -> np.ndarray:
        self.saved["condition"] = condition
        return np.where(condition, a, b)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        condition = self.saved["condition"]
        return np.where(condition, grad, 0.0), np.where(condition, 0.0, grad)


# linear algebra and reductions ----------------------------------------------


class MatMul(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.ndim < 2 or b.ndim < 2:
            raise ShapeError(f"matmul needs 2-D operands, got {a.shape} and {b.shape}")
        if a.shape[-1] != b.shape[-2]:
            raise ShapeError(f"matmul inner dimensions differ: {a.shape} @ {b.shape}")
        self.saved.update(a=a, b=b)
        return np.matmul(a, b)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        a, b = self.saved["a"], self.saved["b"]
        grad_a = np.matmul(grad, np.swapaxes(b, -1, -2)) if self.inputs[0].requires_grad else None
        grad_b = np.matmul(np.swapaxes(a, -1, -2), grad) if self.inputs[1].requires_grad else None
        return grad_a, grad_b


def _normalize_axes(axis: int | Sequence[int] | None, ndim: int) -> tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    return tuple(sorted(a % ndim for a in axes))


def _expand_reduced(grad: np.ndarray, shape: tuple[int, ...], axes: tuple[int, ...],
                    keepdims: bool) -> np.ndarray:
    if not keepdims:
        grad = np.expand_dims(grad, axes)
    return np.broadcast_to(grad, shape)


class Sum(Function):
    def forward(self, a: np.ndarray, axis: Any = None, keepdims: bool = False) -> np.ndarray:
        axes = _normalize_axes(axis, a.ndim)
        self.saved.update(shape=a.shape, axes=axes, keepdims=keepdims)
        return np.sum(a, axis=axes, keepdims=keepdims)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        s = self.saved
        return (_expand_reduced(grad, s["shape"], s["axes"], s["keepdims"]),)


class Mean(Function):
    def forward(self, a: np.ndarray, axis: Any = None, keepdims: bool = False) -> np.ndarray:
        axes = _normalize_axes(axis, a.ndim)
        count = int(np.prod([a.shape[i] for i in axes])) if axes else 1
        self.saved.update(shape=a.shape, axes=axes, keepdims=keepdims, count=count)
        return np.mean(a, axis=axes, keepdims=keepdims)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        s = self.saved
        return (_expand_reduced(grad / s["count"], s["shape"], s["axes"], s["keepdims"]),)


class Extreme(Function):
    """max/min reduction; ties share the gradient equally"""

    def forward(
        self, a: np.ndarray, axis: Any = None, keepdims: bool = False, mode: str = "max"
    ) -> np.ndarray:
        axes = _normalize_axes(axis, a.ndim)
        reducer = np.max if mode == "max" else np.min
        kept = reducer(a, axis=axes, keepdims=True)
        hits = a == kept
        self.saved.update(hits=hits, axes=axes, keepdims=keepdims, shape=a.shape)
        return kept if keepdims else np.squeeze(kept, axis=axes)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        s = self.saved
        hits = s["hits"]
        share = hits / hits.sum(axis=s["axes"], keepdims=True)
        return (_expand_reduced(grad, s["shape"], s["axes"], s["keepdims"]) * share,)


class Cumsum(Function):
    def forward(self, a: np.ndarray, axis: int = -1) -> np.ndarray:
        self.saved["axis"] = axis
        return np.cumsum(a, axis=axis)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        axis = self.saved["axis"]
        return (np.flip(np.cumsum(np.flip(grad, axis), axis=axis), axis),)


# shape manipulation -------------------------------------------------------


class Reshape(Function):
    def forward(self, a: np.ndarray, shape: tuple[int, ...] = ()) -> np.ndarray:
        self.saved["shape"] = a.shape
        try:
            return a.reshape(shape)
        except ValueError as e:
            raise ShapeError(f"cannot reshape {a.shape} to {shape}") from e

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (grad.reshape(self.saved["shape"]),)


class Transpose(Function):
    def forward(self, a: np.ndarray, axes: tuple[int, ...] | None = None) -> np.ndarray:
        axes = tuple(reversed(range(a.ndim))) if axes is None else axes
        self.saved["inverse"] = tuple(np.argsort(axes))
        return np.transpose(a, axes)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (np.transpose(grad, self.saved["inverse"]),)


class BroadcastTo(Function):
    def forward(self, a: np.ndarray, shape: tuple[int, ...] = ()) -> np.ndarray:
        try:
            return np.broadcast_to(a, shape)
        except ValueError as e:
            raise ShapeError(f"cannot broadcast {a.shape} to {shape}") from e

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        return (grad,)


class GetItem(Function):
    def forward(self, a: np.ndarray, index: Any = None) -> np.ndarray:
        self.saved.update(shape=a.shape, index=index, dtype=a.dtype)
        return a[index]

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        s = self.saved
        out = np.zeros(s["shape"], dtype=grad.dtype)
        if _is_basic_index(s["index"]):
            out[s["index"]] = grad
        else:
            np.add.at(out, s["index"], grad)
        return (out,)


class Pad(Function):
    """np.pad with constant (zero), edge or reflect modes"""

    def forward(
        self, a: np.ndarray, widths: tuple[tuple[int, int], ...] = (), mode: str = "constant"
    ) -> np.ndarray:
        if mode not in {"constant", "edge", "reflect"}:
            raise ValueError(f"Unsupported pad mode: {mode}")
        self.saved.update(shape=a.shape, widths=widths, mode=mode)
        return np.pad(a, widths, mode=mode)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        shape, widths, mode = self.saved["shape"], self.saved["widths"], self.saved["mode"]
        if mode == "constant":
            interior = tuple(slice(lo, lo + n) for (lo, _), n in zip(widths, shape))
            return (grad[interior],)
        # adjoint of a gather: scatter each padded cell back to its source index
        source = np.pad(np.arange(int(np.prod(shape))).reshape(shape), widths, mode=mode)
        flat = np.bincount(source.ravel(), weights=grad.ravel(), minlength=int(np.prod(shape)))
        return (flat.reshape(shape).astype(grad.dtype),)


class Concat(Function):
    def forward(self, *arrays: np.ndarray, axis: int = 0) -> np.ndarray:
        self.saved.update(axis=axis, sizes=[a.shape[axis] for a in arrays])
        return np.concatenate(arrays, axis=axis)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        splits = np.cumsum(self.saved["sizes"])[:-1]
        return tuple(np.split(grad, splits, axis=self.saved["axis"]))


class Stack(Function):
    def forward(self, *arrays: np.ndarray, axis: int = 0) -> np.ndarray:
        self.saved["axis"] = axis
        return np.stack(arrays, axis=axis)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        axis = self.saved["axis"]
        return tuple(np.take(grad, i, axis=axis) for i in range(grad.shape[axis]))


# functional entry points ---------------------------------------------------

_UNARY = {
    "neg": Neg,
    "exp": Exp,
    "log": Log,
    "sin": Sin,
    "cos": Cos,
    "softplus": Softplus,
    "sigmoid": Sigmoid,
    "abs": Abs,
    "tanh": Tanh,
}
_BINARY = {
    "add": Add,
    "sub": Sub,
    "mul": Mul,
    "div": Div,
    "pow": Pow,
    "min": Minimum,
    "max": Maximum,
}


def elementwise(op_kind: str, a: Any, b: Any = None, **kwargs: Any) -> Tensor:
    """
    Apply a named elementwise operation with trailing-dimension broadcasting

    Args:
        op_kind: One of add, sub, mul, div, neg, exp, log, sin, cos, pow,
            softplus, leaky_relu, sigmoid, abs, min, max, clamp, tanh
        a: First operand
        b: Second operand for binary kinds
        **kwargs: `slope` for leaky_relu, `low`/`high` for clamp

    Returns:
        Result tensor

    Raises:
        ShapeError: If the operands do not broadcast
    """
    if op_kind in _BINARY:
        if b is None:
            raise ValueError(f"{op_kind} needs two operands")
        return _BINARY[op_kind].apply(a, b)
    if op_kind in _UNARY:
        return _UNARY[op_kind].apply(a)
    if op_kind == "leaky_relu":
        return LeakyReLU.apply(a, slope=kwargs.get("slope", 0.2))
    if op_kind == "clamp":
        return Clamp.apply(a, low=kwargs.get("low"), high=kwargs.get("high"))
    raise ValueError(f"Unknown elementwise op: {op_kind}")


def matmul(a: Any, b: Any) -> Tensor:
    return MatMul.apply(a, b)


def reduce(op: str, x: Tensor, axes: int | Sequence[int] | None = None,
           keepdims: bool = False) -> Tensor:
    """Reduce x with sum, mean, min or max over axes (all axes when None)"""
    if op == "sum":
        return x.sum(axes, keepdims)
    if op == "mean":
        return x.mean(axes, keepdims)
    if op in {"min", "max"}:
        return Extreme.apply(x, axis=axes, keepdims=keepdims, mode=op)
    raise ValueError(f"Unknown reduction: {op}")


def minimum(a: Any, b: Any) -> Tensor:
    return Minimum.apply(a, b)


def maximum(a: Any, b: Any) -> Tensor:
    return Maximum.apply(a, b)


def where(condition: np.ndarray, a: Any, b: Any) -> Tensor:
    """Select from a where condition holds, else from b (condition is constant)"""
    return Where.apply(a, b, condition=np.asarray(condition, dtype=bool))


def concat(tensors: Sequence[Any], axis: int = 0) -> Tensor:
    return Concat.apply(*tensors, axis=axis)


def stack(tensors: Sequence[Any], axis: int = 0) -> Tensor:
    return Stack.apply(*tensors, axis=axis)
