"""AdamW with decoupled weight decay, plus a warm-restart cosine schedule."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeError
from .tensor import Tensor


class AdamW:
    """Decoupled-weight-decay Adam over a {name: Tensor} parameter dict.

    Moment accumulators are allocated lazily per parameter and always match
    the parameter's shape. Defaults: lr=5e-3, betas=(0.9, 0.999),
    weight_decay=5e-4.
    """

    def __init__(self, params: dict, lr: float = 5e-3, betas=(0.9, 0.999),
                 eps: float = 1e-8, weight_decay: float = 5e-4):
        self.params = params
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self.m = {name: np.zeros_like(p.data) for name, p in params.items()}
        self.v = {name: np.zeros_like(p.data) for name, p in params.items()}

    def step(self, lr: float | None = None) -> None:
        """One update from the ``.grad`` fields; parameters without a gradient are skipped."""
        lr = self.lr if lr is None else lr
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1**t
        bc2 = 1.0 - self.beta2**t
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            if g.shape != p.data.shape:
                raise ShapeError(
                    f"gradient shape {g.shape} != parameter shape {p.data.shape} for {name!r}")
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            if self.weight_decay:
                p.data *= 1.0 - lr * self.weight_decay
            p.data -= lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.grad = None


def cosine_warm_restarts(epoch: int, base_lr: float, period: int = 20,
                         t_mult: int = 2, min_lr: float = 0.0) -> float:
    """Learning rate at ``epoch`` under a cosine schedule with warm restarts.

    The rate decays from ``base_lr`` to ``min_lr`` over ``period`` epochs,
    then restarts with the period multiplied by ``t_mult``.
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    t, length = epoch, period
    while t >= length:
        t -= length
        length *= t_mult
    return min_lr + 0.5 * (base_lr - min_lr) * (1.0 + math.cos(math.pi * t / length))


def adamw_step(params: dict, state: AdamW, lr: float | None = None) -> None:
    """Functional alias: apply one AdamW update using ``state``'s accumulators."""
    if state.params is not params:
        raise ShapeError("optimizer state was built for a different parameter dict")
    state.step(lr=lr)
