"""Dense float64 tensors with tape-based reverse-mode differentiation.

A ``Tape`` is a Wengert list: every primitive executed while a tape is
active appends one node holding the operands and a closure that maps the
output gradient to operand gradients. ``backward`` walks the list once in
reverse creation order (a valid reverse topological order by construction)
and accumulates gradients into the participating leaves.

Every operation validates that its result is finite; NaN/Inf raises
``NumericError`` instead of propagating.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import NumericError, ShapeError, UsageError

__all__ = [
    "Tensor", "Tape", "backward", "zero_grad",
    "add", "sub", "mul", "div", "neg", "matmul", "transpose", "reshape",
    "getitem", "concat", "tensor_sum", "tensor_mean", "tensor_abs",
    "tanh", "sigmoid", "softmax", "layer_norm", "group_norm", "attention",
    "mse", "l1",
]

_ACTIVE_TAPE = None


class Tensor:
    """Immutable-by-convention wrapper around a float64 ndarray."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise NumericError("tensor constructed with non-finite values")
        self.data = arr
        self.requires_grad = requires_grad
        self.grad = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # operator sugar; all routed through the module-level primitives
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return getitem(self, idx)

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) != 1 else shape[0])

    @property
    def T(self):
        return transpose(self)

    def sum(self, axis=None, keepdims=False):
        return tensor_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tensor_mean(self, axis=axis, keepdims=keepdims)


class _Node:
    __slots__ = ("out", "inputs", "backward_fn", "op")

    def __init__(self, out, inputs, backward_fn, op):
        self.out = out
        self.inputs = inputs
        self.backward_fn = backward_fn
        self.op = op


class Tape:
    """Ordered record of primitives; use as a context manager around a forward pass."""

    def __init__(self):
        self.nodes = []

    def __enter__(self):
        global _ACTIVE_TAPE
        if _ACTIVE_TAPE is not None:
            raise UsageError("nested tapes are not supported")
        _ACTIVE_TAPE = self
        return self

    def __exit__(self, exc_type, exc, tb):
        global _ACTIVE_TAPE
        _ACTIVE_TAPE = None
        return False

    def __len__(self):
        return len(self.nodes)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(op: str, data: np.ndarray, inputs, backward_fn) -> Tensor:
    """Wrap an op result, enforce finiteness, and record on the active tape."""
    if not np.all(np.isfinite(data)):
        raise NumericError(f"non-finite values produced by {op}")
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    out.requires_grad = any(t.requires_grad for t in inputs)
    if _ACTIVE_TAPE is not None and out.requires_grad:
        _ACTIVE_TAPE.nodes.append(_Node(out, inputs, backward_fn, op))
    return out


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum a broadcast gradient back down to the operand's shape."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, d in enumerate(shape) if d == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def backward(tape: Tape, loss: Tensor):
    """Reverse sweep over the tape; returns {leaf tensor: gradient ndarray}.

    Gradients are also accumulated into ``.grad`` of every requires_grad
    leaf, so parameters can be handed straight to an optimizer.
    """
    if loss.size != 1:
        raise UsageError(f"backward requires a scalar loss, got shape {loss.shape}")
    grads = {id(loss): np.ones_like(loss.data)}
    produced = {id(node.out) for node in tape.nodes}
    leaf_grads = {}
    for node in reversed(tape.nodes):
        gout = grads.pop(id(node.out), None)
        if gout is None:
            continue
        for inp, g in zip(node.inputs, node.backward_fn(gout)):
            if g is None or not inp.requires_grad:
                continue
            key = id(inp)
            if key in grads:
                grads[key] = grads[key] + g
            else:
                grads[key] = g
            if key not in produced:
                leaf_grads[inp] = grads[key]
    for leaf, g in leaf_grads.items():
        leaf.grad = g if leaf.grad is None else leaf.grad + g
    return leaf_grads


def zero_grad(params) -> None:
    """Clear ``.grad`` on an iterable or dict of tensors."""
    values = params.values() if isinstance(params, dict) else params
    for p in values:
        p.grad = None


# --------------------------------------------------------------------------
# primitives
# --------------------------------------------------------------------------

def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = a.data + b.data
    return _make("add", out, (a, b), lambda g: (
        _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)))


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = a.data - b.data
    return _make("sub", out, (a, b), lambda g: (
        _unbroadcast(g, a.data.shape), _unbroadcast(-g, b.data.shape)))


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = a.data * b.data
    return _make("mul", out, (a, b), lambda g: (
        _unbroadcast(g * b.data, a.data.shape), _unbroadcast(g * a.data, b.data.shape)))


def div(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out = a.data / b.data
    return _make("div", out, (a, b), lambda g: (
        _unbroadcast(g / b.data, a.data.shape),
        _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape)))


def neg(a) -> Tensor:
    a = _as_tensor(a)
    return _make("neg", -a.data, (a,), lambda g: (-g,))


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.shape} @ {b.shape}")
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul inner dimensions disagree: {a.shape} @ {b.shape}")
    out = a.data @ b.data
    return _make("matmul", out, (a, b), lambda g: (g @ b.data.T, a.data.T @ g))


def transpose(a, axes=None) -> Tensor:
    a = _as_tensor(a)
    out = np.transpose(a.data, axes)
    inv = None if axes is None else np.argsort(axes)
    return _make("transpose", out, (a,), lambda g: (np.transpose(g, inv),))


def reshape(a, shape) -> Tensor:
    a = _as_tensor(a)
    out = np.reshape(a.data, shape)
    orig = a.data.shape
    return _make("reshape", out, (a,), lambda g: (np.reshape(g, orig),))


def getitem(a, idx) -> Tensor:
    a = _as_tensor(a)
    out = a.data[idx]

    def bw(g):
        full = np.zeros_like(a.data)
        np.add.at(full, idx, g)
        return (full,)

    return _make("getitem", np.array(out, dtype=np.float64), (a,), bw)


def concat(tensors, axis=0) -> Tensor:
    tensors = tuple(_as_tensor(t) for t in tensors)
    out = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def bw(g):
        return tuple(
            np.take(g, np.arange(offsets[i], offsets[i + 1]), axis=axis)
            for i in range(len(tensors)))

    return _make("concat", out, tensors, bw)


def tensor_sum(a, axis=None, keepdims=False) -> Tensor:
    a = _as_tensor(a)
    out = np.sum(a.data, axis=axis, keepdims=keepdims)
    shape = a.data.shape

    def bw(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape).copy(),)

    return _make("sum", np.asarray(out), (a,), bw)


def tensor_mean(a, axis=None, keepdims=False) -> Tensor:
    a = _as_tensor(a)
    out = np.mean(a.data, axis=axis, keepdims=keepdims)
    shape = a.data.shape
    n = a.data.size if axis is None else shape[axis]

    def bw(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape) / n,)

    return _make("mean", np.asarray(out), (a,), bw)


def tensor_abs(a) -> Tensor:
    """|a|, with subgradient 0 at exactly 0."""
    a = _as_tensor(a)
    sign = np.sign(a.data)
    return _make("abs", np.abs(a.data), (a,), lambda g: (g * sign,))


def tanh(a) -> Tensor:
    a = _as_tensor(a)
    out = np.tanh(a.data)
    return _make("tanh", out, (a,), lambda g: (g * (1.0 - out * out),))


def sigmoid(a) -> Tensor:
    a = _as_tensor(a)
    x = a.data
    out = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                   np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))
    return _make("sigmoid", out, (a,), lambda g: (g * out * (1.0 - out),))


def softmax(a, axis=-1) -> Tensor:
    a = _as_tensor(a)
    shifted = a.data - np.max(a.data, axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / np.sum(e, axis=axis, keepdims=True)

    def bw(g):
        inner = np.sum(g * out, axis=axis, keepdims=True)
        return (out * (g - inner),)

    return _make("softmax", out, (a,), bw)


def layer_norm(x, gamma, beta, eps: float = 1e-5) -> Tensor:
    """Standardize the last axis to zero mean / unit variance, then affine."""
    x, gamma, beta = _as_tensor(x), _as_tensor(gamma), _as_tensor(beta)
    d = x.data.shape[-1]
    if gamma.data.shape != (d,) or beta.data.shape != (d,):
        raise ShapeError(
            f"layer_norm affine shape {gamma.shape}/{beta.shape} does not match last axis {d}")
    if eps <= 0:
        raise UsageError("layer_norm eps must be positive")
    mu = np.mean(x.data, axis=-1, keepdims=True)
    var = np.var(x.data, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    out = xhat * gamma.data + beta.data

    def bw(g):
        lead = tuple(range(g.ndim - 1))
        dgamma = np.sum(g * xhat, axis=lead)
        dbeta = np.sum(g, axis=lead)
        gh = g * gamma.data
        dx = inv * (gh - np.mean(gh, axis=-1, keepdims=True)
                    - xhat * np.mean(gh * xhat, axis=-1, keepdims=True))
        return (dx, dgamma, dbeta)

    return _make("layer_norm", out, (x, gamma, beta), bw)


def group_norm(x, groups: int = 8, eps: float = 1e-5) -> Tensor:
    """Per-row standardization within channel groups; no learned affine."""
    x = _as_tensor(x)
    if x.data.ndim != 2:
        raise ShapeError(f"group_norm expects a 2-D input, got {x.shape}")
    n, c = x.data.shape
    if c % groups != 0:
        raise ShapeError(f"channel count {c} not divisible by {groups} groups")
    xg = x.data.reshape(n, groups, c // groups)
    mu = np.mean(xg, axis=-1, keepdims=True)
    var = np.var(xg, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (xg - mu) * inv

    def bw(g):
        gg = g.reshape(n, groups, c // groups)
        dx = inv * (gg - np.mean(gg, axis=-1, keepdims=True)
                    - xhat * np.mean(gg * xhat, axis=-1, keepdims=True))
        return (dx.reshape(n, c),)

    return _make("group_norm", xhat.reshape(n, c), (x,), bw)


def attention(q, k, v, heads: int = 1, w_out=None) -> Tensor:
    """Multi-head scaled dot-product attention.

    q: (nq, d), k: (nk, d), v: (nk, dv); d and dv must be divisible by
    ``heads``. Heads are contiguous column blocks; their outputs are
    concatenated and, when ``w_out`` is given, projected by it.
    """
    q, k, v = _as_tensor(q), _as_tensor(k), _as_tensor(v)
    nq, d = q.data.shape
    nk, dk = k.data.shape
    if dk != d:
        raise ShapeError(f"query width {d} != key width {dk}")
    if v.data.shape[0] != nk:
        raise ShapeError(f"key count {nk} != value count {v.data.shape[0]}")
    dv = v.data.shape[1]
    if d % heads or dv % heads:
        raise ShapeError(f"widths ({d}, {dv}) not divisible by {heads} heads")
    dh, dvh = d // heads, dv // heads
    scale = 1.0 / math.sqrt(dh)
    outs = []
    for h in range(heads):
        qh = getitem(q, (slice(None), slice(h * dh, (h + 1) * dh)))
        kh = getitem(k, (slice(None), slice(h * dh, (h + 1) * dh)))
        vh = getitem(v, (slice(None), slice(h * dvh, (h + 1) * dvh)))
        scores = mul(matmul(qh, transpose(kh)), scale)
        outs.append(matmul(softmax(scores, axis=-1), vh))
    out = outs[0] if heads == 1 else concat(outs, axis=1)
    return out if w_out is None else matmul(out, w_out)


def mse(pred, target) -> Tensor:
    """Mean squared error over all elements."""
    d = sub(pred, target)
    return tensor_mean(mul(d, d))


def l1(pred, target) -> Tensor:
    """Mean absolute error over all elements."""
    return tensor_mean(tensor_abs(sub(pred, target)))
