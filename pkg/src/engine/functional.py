"""Image-space differentiable operations built on the tensor engine"""

from __future__ import annotations

from typing import Any

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .exceptions import ShapeError
from .tensor import Function, Tensor, as_tensor, stack


class Conv2d(Function):
    """Cross-correlation of [B,C,H,W] input with an [O,C,kh,kw] kernel"""

    def forward(
        self, x: np.ndarray, kernel: np.ndarray, stride: int = 1, padding: str = "same"
    ) -> np.ndarray:
        if x.ndim != 4 or kernel.ndim != 4:
            raise ShapeError(f"conv2d expects 4-D input and kernel, got {x.shape}, {kernel.shape}")
        if x.shape[1] != kernel.shape[1]:
            raise ShapeError(
                f"conv2d channel mismatch: input has {x.shape[1]}, kernel expects {kernel.shape[1]}"
            )
        kh, kw = kernel.shape[2:]
        if kh % 2 == 0 or kw % 2 == 0:
            raise ShapeError(f"conv2d kernel sizes must be odd, got {kh}x{kw}")
        if padding not in {"same", "valid"}:
            raise ValueError(f"padding must be 'same' or 'valid', got {padding}")
        ph, pw = (kh // 2, kw // 2) if padding == "same" else (0, 0)
        padded = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
        windows = sliding_window_view(padded, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
        out = np.tensordot(windows, kernel, axes=([1, 4, 5], [1, 2, 3]))
        self.saved.update(
            windows=windows, kernel=kernel, stride=stride, pads=(ph, pw), padded_shape=padded.shape
        )
        return np.ascontiguousarray(out.transpose(0, 3, 1, 2))

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        s = self.saved
        windows, kernel, stride = s["windows"], s["kernel"], s["stride"]
        grad_kernel = None
        if self.inputs[1].requires_grad:
            grad_kernel = np.tensordot(grad, windows, axes=([0, 2, 3], [0, 2, 3]))
        grad_x = None
        if self.inputs[0].requires_grad:
            _, _, out_h, out_w = grad.shape
            padded = np.zeros(s["padded_shape"], dtype=grad.dtype)
            kh, kw = kernel.shape[2:]
            # fixed (i, j) order keeps the accumulation deterministic
            for i in range(kh):
                for j in range(kw):
                    contrib = np.tensordot(grad, kernel[:, :, i, j], axes=([1], [0]))
                    padded[
                        :, :, i : i + stride * out_h : stride, j : j + stride * out_w : stride
                    ] += contrib.transpose(0, 3, 1, 2)
            ph, pw = s["pads"]
            grad_x = padded[:, :, ph : padded.shape[2] - ph, pw : padded.shape[3] - pw]
        return grad_x, grad_kernel


def conv2d(x: Any, kernel: Any, stride: int = 1, padding: str = "same") -> Tensor:
    """
    2-D cross-correlation

    Args:
        x: Input of shape [B, C, H, W]
        kernel: Weights of shape [O, C, kh, kw] with odd kh, kw
        stride: Step between output samples
        padding: "same" (zero padding, keeps H, W at stride 1) or "valid"

    Returns:
        Output of shape [B, O, H', W']
    """
    return Conv2d.apply(x, kernel, stride=stride, padding=padding)


class BilinearSample(Function):
    """Gather src at continuous (x, y) pixel coordinates with clamp-to-edge"""

    def forward(self, src: np.ndarray, coords: np.ndarray) -> np.ndarray:
        batched = src.ndim == 4
        if not batched:
            src, coords = src[None], coords[None]
        if coords.shape[-1] != 2 or coords.shape[0] != src.shape[0]:
            raise ShapeError(f"coords {coords.shape} do not match source {src.shape}")
        _, _, height, width = src.shape
        x, y = coords[..., 0], coords[..., 1]
        xc, yc = np.clip(x, 0, width - 1), np.clip(y, 0, height - 1)
        x0 = np.minimum(np.floor(xc), max(width - 2, 0)).astype(np.int64)
        y0 = np.minimum(np.floor(yc), max(height - 2, 0)).astype(np.int64)
        x1, y1 = np.minimum(x0 + 1, width - 1), np.minimum(y0 + 1, height - 1)
        wx = (xc - x0).astype(src.dtype)[..., None]
        wy = (yc - y0).astype(src.dtype)[..., None]
        channels_last = np.transpose(src, (0, 2, 3, 1))
        batch = np.arange(src.shape[0]).reshape(-1, 1, 1)
        ia = channels_last[batch, y0, x0]
        ib = channels_last[batch, y0, x1]
        ic = channels_last[batch, y1, x0]
        id_ = channels_last[batch, y1, x1]
        out = (1 - wx) * (1 - wy) * ia + wx * (1 - wy) * ib + (1 - wx) * wy * ic + wx * wy * id_
        self.saved.update(
            batched=batched,
            shape=src.shape,
            index=(batch, y0, x0, y1, x1),
            weights=(wx, wy),
            corners=(ia, ib, ic, id_),
            inside_x=(x >= 0) & (x <= width - 1),
            inside_y=(y >= 0) & (y <= height - 1),
        )
        out = np.transpose(out, (0, 3, 1, 2))
        return out if batched else out[0]

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        s = self.saved
        if not s["batched"]:
            grad = grad[None]
        g = np.transpose(grad, (0, 2, 3, 1))
        batch, y0, x0, y1, x1 = s["index"]
        wx, wy = s["weights"]
        ia, ib, ic, id_ = s["corners"]

        grad_src = None
        if self.inputs[0].requires_grad:
            b, _, h, w = s["shape"]
            acc = np.zeros((b, h, w, s["shape"][1]), dtype=grad.dtype)
            batch_full = np.broadcast_to(batch, y0.shape)
            np.add.at(acc, (batch_full, y0, x0), g * (1 - wx) * (1 - wy))
            np.add.at(acc, (batch_full, y0, x1), g * wx * (1 - wy))
            np.add.at(acc, (batch_full, y1, x0), g * (1 - wx) * wy)
            np.add.at(acc, (batch_full, y1, x1), g * wx * wy)
            grad_src = np.transpose(acc, (0, 3, 1, 2))
            if not s["batched"]:
                grad_src = grad_src[0]

        grad_coords = None
        if self.inputs[1].requires_grad:
            dx = ((1 - wy) * (ib - ia) + wy * (id_ - ic)) * g
            dy = ((1 - wx) * (ic - ia) + wx * (id_ - ib)) * g
            gx = dx.sum(axis=-1) * s["inside_x"]
            gy = dy.sum(axis=-1) * s["inside_y"]
            grad_coords = np.stack([gx, gy], axis=-1)
            if not s["batched"]:
                grad_coords = grad_coords[0]
        return grad_src, grad_coords


def bilinear_sample(src: Any, coords: Any) -> Tensor:
    """
    Bilinear interpolation of src at continuous pixel coordinates

    Integer coordinates address pixel centers, so coords (0, 0) returns
    src[..., 0, 0] exactly. Out-of-range coordinates clamp to the edge and
    carry no coordinate gradient.

    Args:
        src: Values of shape [C, H, W] or [B, C, H, W]
        coords: (x, y) locations of shape [H', W', 2] or [B, H', W', 2]

    Returns:
        Samples of shape [C, H', W'] or [B, C, H', W']
    """
    return BilinearSample.apply(src, coords)


def _upsample_axis(x: Tensor, axis: int) -> Tensor:
    widths = [(0, 0)] * x.ndim
    widths[axis] = (1, 1)
    padded = x.pad(widths, mode="edge")
    n = x.shape[axis]

    def take(start: int) -> Tensor:
        index = [slice(None)] * x.ndim
        index[axis] = slice(start, start + n)
        return padded[tuple(index)]

    prev, centre, nxt = take(0), take(1), take(2)
    even = prev * 0.25 + centre * 0.75
    odd = centre * 0.75 + nxt * 0.25
    interleaved = stack([even, odd], axis=axis + 1)
    shape = list(x.shape)
    shape[axis] = 2 * n
    return interleaved.reshape(tuple(shape))


def bilinear_upsample(x: Any, factor: int = 2) -> Tensor:
    """
    Bilinear upsampling by two with the align-corners-false convention

    Args:
        x: Input of shape [B, C, H, W]
        factor: Must be 2

    Returns:
        Output of shape [B, C, 2H, 2W]
    """
    if factor != 2:
        raise ValueError(f"Only factor 2 upsampling is supported, got {factor}")
    x = as_tensor(x)
    if x.ndim != 4:
        raise ShapeError(f"bilinear_upsample expects [B, C, H, W], got {x.shape}")
    return _upsample_axis(_upsample_axis(x, 2), 3)


def avg_pool2d(x: Any, size: int = 2) -> Tensor:
    """Non-overlapping average pooling over the last two axes"""
    x = as_tensor(x)
    h, w = x.shape[-2:]
    if h % size or w % size:
        raise ShapeError(f"avg_pool2d size {size} does not divide {h}x{w}")
    lead = x.shape[:-2]
    blocks = x.reshape(lead + (h // size, size, w // size, size))
    return blocks.mean(axis=(x.ndim - 1, x.ndim + 1))


def box_filter3x3(x: Any) -> Tensor:
    """3x3 mean filter over the last two axes with reflect padding"""
    x = as_tensor(x)
    h, w = x.shape[-2:]
    widths = [(0, 0)] * (x.ndim - 2) + [(1, 1), (1, 1)]
    padded = x.pad(widths, mode="reflect")
    total = None
    for i in range(3):
        for j in range(3):
            tap = padded[..., i : i + h, j : j + w]
            total = tap if total is None else total + tap
    return total / 9.0
