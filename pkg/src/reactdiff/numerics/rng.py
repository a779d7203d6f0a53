"""Seeded, platform-independent pseudo-random streams.

The generator is splitmix64 (a 64-bit xorshift-multiply mixer) driven in
counter mode: draw ``i`` of a stream with seed ``s`` is ``mix64(s + (i+1) *
GAMMA) >> 11``, scaled to [0, 1). Counter mode keeps the stream a pure
function of (seed, position), so arbitrarily large blocks can be produced
with vectorized uint64 arithmetic and the sequence is bit-identical on every
platform. Normal deviates come from the Box-Muller transform.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2POW53 = float(2.0**-53)


def _mix_array(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def mix64(z: int) -> int:
    """splitmix64 finalizer on a Python int, modulo 2**64."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _key_to_int(key) -> int:
    """Stable 64-bit digest of an int or string sub-stream key."""
    if isinstance(key, (int, np.integer)):
        return int(key) & _MASK
    if isinstance(key, str):
        digest = hashlib.sha256(key.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"rng key must be int or str, got {type(key).__name__}")


class Rng:
    """One deterministic stream. Position advances with every draw."""

    def __init__(self, seed: int):
        self._seed = int(seed) & _MASK
        self._pos = 0

    @property
    def seed(self) -> int:
        return self._seed

    def spawn(self, key) -> "Rng":
        """Independent child stream for (seed, key); does not move this stream."""
        return Rng(mix64(self._seed ^ mix64(_key_to_int(key) ^ _GAMMA)))

    def _raw(self, n: int) -> np.ndarray:
        idx = np.arange(self._pos + 1, self._pos + n + 1, dtype=np.uint64)
        self._pos += n
        return _mix_array(np.uint64(self._seed) + idx * np.uint64(_GAMMA))

    def uniform(self, shape=()) -> np.ndarray:
        """float64 draws in [0, 1) with 53-bit resolution."""
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        n = int(np.prod(shape)) if shape else 1
        u = (self._raw(n) >> np.uint64(11)).astype(np.float64) * _INV_2POW53
        return u.reshape(shape) if shape else u[0]

    def normal(self, shape=()) -> np.ndarray:
        """Standard normal draws via Box-Muller on consecutive uniform pairs."""
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        n = int(np.prod(shape)) if shape else 1
        m = (n + 1) // 2
        u1 = self.uniform((m,))
        u2 = self.uniform((m,))
        r = np.sqrt(-2.0 * np.log1p(-u1))  # 1-u1 in (0,1], log is finite
        theta = 2.0 * np.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return z.reshape(shape) if shape else z[0]

    def integers(self, low: int, high: int, shape=()) -> np.ndarray:
        """Integer draws in [low, high), uniform up to 2**-53 quantization."""
        if high <= low:
            raise ValueError(f"empty integer range [{low}, {high})")
        u = self.uniform(shape)
        return (np.floor(u * (high - low)) + low).astype(np.int64)

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n) (argsort of fresh uniforms)."""
        return np.argsort(self.uniform((n,)), kind="stable")

    def __repr__(self):
        return f"Rng(seed={self._seed:#x}, pos={self._pos})"
