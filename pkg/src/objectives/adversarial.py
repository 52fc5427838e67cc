"""Non-saturating GAN losses and the R1 gradient penalty"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import Any

import numpy as np

from ..engine import Function, Tensor, as_tensor, precision
from ..engine.exceptions import NonFiniteError

LAMBDA_R1 = 10.0
# input-space step of the finite-difference Hessian-vector product
R1_STEP = 1e-3

ScoreFn = Callable[[Tensor], Tensor]


def gan_d_loss(
    d_real: Tensor, d_fake: Tensor, r1: Tensor | None = None, lambda_r1: float = LAMBDA_R1
) -> Tensor:
    """
    Discriminator loss softplus(d_fake) + softplus(-d_real) + lambda * R1

    Args:
        d_real: Scores of real images
        d_fake: Scores of generated images
        r1: Per-sample squared input-gradient norms at the real images
        lambda_r1: R1 weight

    Raises:
        NonFiniteError: If the gradient norms are not finite
    """
    loss = as_tensor(d_fake).softplus().mean() + (-as_tensor(d_real)).softplus().mean()
    if r1 is None:
        return loss
    r1 = as_tensor(r1)
    if not r1.is_finite():
        raise NonFiniteError("R1 gradient norm is not finite")
    return loss + r1.mean() * lambda_r1


def gan_g_loss(d_fake: Tensor, reproj: Tensor | float = 0.0, reproj_weight: float = 1.0) -> Tensor:
    """Non-saturating generator loss softplus(-d_fake) plus the weighted re-projection term"""
    return (-as_tensor(d_fake)).softplus().mean() + as_tensor(reproj) * reproj_weight


def _input_gradient(score_fn: ScoreFn, images: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = Tensor(images, requires_grad=True)
    scores = as_tensor(score_fn(x)).reshape(-1)
    if not scores.requires_grad:
        return np.zeros_like(x.data), scores.data
    scores.sum().backward()
    grad = np.zeros_like(x.data) if x.grad is None else x.grad
    return grad, scores.data


class R1Penalty(Function):
    """
    Squared norm of dD/dx per sample

    The forward pass runs a separate tape to get the input gradient. The
    parameter gradient of the penalty is a mixed second derivative; it is
    obtained as a central difference of parameter gradients taken at
    x +/- step * dD/dx, so the engine never differentiates a backward pass.
    """

    def forward(self, *params: np.ndarray, score_fn: ScoreFn = None,
                images: np.ndarray = None) -> np.ndarray:
        tensors = self.inputs
        stash = [p.grad for p in tensors]
        for p in tensors:
            p.grad = None
        try:
            grad, _ = _input_gradient(score_fn, images)
        finally:
            for p, g in zip(tensors, stash):
                p.grad = g
        self.saved.update(score_fn=score_fn, images=images, grad=grad)
        axes = tuple(range(1, grad.ndim))
        return np.sum(grad.astype(np.float64) ** 2, axis=axes)

    def backward(self, upstream: np.ndarray) -> tuple[np.ndarray | None, ...]:
        params = self.inputs
        if not params:
            return ()
        score_fn, images, grad = self.saved["score_fn"], self.saved["images"], self.saved["grad"]
        axes = tuple(range(1, grad.ndim))
        norms = np.sqrt(np.sum(grad.astype(np.float64) ** 2, axis=axes))
        steps = R1_STEP / (norms + 1e-12)
        shape = (-1,) + (1,) * (grad.ndim - 1)
        coef = np.asarray(upstream, dtype=np.float64).reshape(-1) / steps

        originals = [p.data for p in params]
        stash = [p.grad for p in params]
        sides = []
        try:
            with precision("float64"):
                for p in params:
                    p.data = p.data.astype(np.float64)
                for sign in (1.0, -1.0):
                    for p in params:
                        p.grad = None
                    shifted = images + sign * steps.reshape(shape) * grad
                    scores = score_fn(Tensor(shifted)).reshape(-1)
                    (scores * coef).sum().backward()
                    sides.append([
                        np.zeros(p.shape) if p.grad is None else p.grad for p in params
                    ])
        finally:
            for p, data, g in zip(params, originals, stash):
                p.data = data
                p.grad = g
        return tuple(plus - minus for plus, minus in zip(*sides))


def r1_penalty(score_fn: ScoreFn, real_batch: Any,
               params: Sequence[Tensor] = ()) -> Tensor:
    """
    Per-sample R1 penalty ||dD/dI||^2 at real images

    Args:
        score_fn: Maps images [B, ...] to scores [B] or [B, 1]
        real_batch: Real images [B, ...]
        params: Discriminator parameters the penalty is differentiated against

    Returns:
        Tensor [B]
    """
    images = as_tensor(real_batch).data
    return R1Penalty.apply(*params, score_fn=score_fn, images=images)
