"""Tensor algebra, reverse-mode autodiff, AdamW, and linear-algebra kernels."""

from .linalg import sym_sqrt
from .optim import AdamW, adamw_step, cosine_warm_restarts
from .rng import Rng, mix64
from .tensor import (
    Tape,
    Tensor,
    add,
    attention,
    backward,
    concat,
    div,
    getitem,
    group_norm,
    l1,
    layer_norm,
    matmul,
    mse,
    mul,
    neg,
    reshape,
    sigmoid,
    softmax,
    sub,
    tanh,
    tensor_abs,
    tensor_mean,
    tensor_sum,
    transpose,
    zero_grad,
)

__all__ = [
    "AdamW", "Rng", "Tape", "Tensor",
    "adamw_step", "add", "attention", "backward", "concat",
    "cosine_warm_restarts", "div", "getitem", "group_norm", "l1",
    "layer_norm", "matmul", "mix64", "mse", "mul", "neg", "reshape",
    "sigmoid", "softmax", "sub", "sym_sqrt", "tanh", "tensor_abs",
    "tensor_mean", "tensor_sum", "transpose", "zero_grad",
]
