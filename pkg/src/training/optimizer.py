"""Adam and the linear learning-rate decay"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..engine import Tensor


class AdamState:
    """First and second moments per parameter plus the shared step counter"""

    def __init__(self, params: Sequence[Tensor]):
        self.m = [np.zeros_like(p.data) for p in params]
        self.v = [np.zeros_like(p.data) for p in params]
        self.step = 0


def adam_update(
    params: Sequence[Tensor],
    grads: Sequence[np.ndarray | None],
    state: AdamState,
    lr: float,
    beta1: float = 0.0,
    beta2: float = 0.9,
    eps: float = 1e-8,
) -> None:
    """
    One Adam step with bias correction, in place

    Parameters whose gradient is None are left untouched, moments included.

    Args:
        params: Parameters to update
        grads: One gradient (or None) per parameter
        state: Moment buffers, advanced by one step
        lr: Learning rate
        beta1: First-moment decay
        beta2: Second-moment decay
        eps: Denominator stabilizer
    """
    state.step += 1
    t = state.step
    correction1 = 1.0 - beta1**t
    correction2 = 1.0 - beta2**t
    for i, (param, grad) in enumerate(zip(params, grads)):
        if grad is None:
            continue
        grad = grad.astype(param.data.dtype, copy=False)
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad * grad
        m_hat = state.m[i] / correction1
        v_hat = state.v[i] / correction2
        param.data = (param.data - lr * m_hat / (np.sqrt(v_hat) + eps)).astype(param.data.dtype)


class Adam:
    """Adam over a fixed, ordered parameter list"""

    def __init__(self, params: Sequence[Tensor], beta1: float = 0.0, beta2: float = 0.9,
                 eps: float = 1e-8):
        self.params = list(params)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState(self.params)

    def step(self, lr: float) -> None:
        adam_update(self.params, [p.grad for p in self.params], self.state, lr,
                    self.beta1, self.beta2, self.eps)

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None


def lr_schedule(step: int, total: int, lr0: float, lr_final: float) -> float:
    """
    Linear decay from lr0 at step 0 to lr_final at step total

    Steps beyond total keep lr_final.
    """
    if total <= 0:
        return lr_final
    t = min(max(step / total, 0.0), 1.0)
    return (1.0 - t) * lr0 + t * lr_final
