"""Matrix conventions and deterministic random streams.

Every tensor in this library is a 2-D, C-order, float64 numpy array;
column vectors have shape (n, 1).  matmul and elementwise are thin
shape-checked wrappers so dimension errors surface with both operand
shapes in the message instead of deep inside a traceback.

All randomness flows through RngStream, a counter-based (Philox) bit
stream keyed by (seed, stream_id).  Gaussian variates come from the
Box-Muller transform applied to the stream's uniforms, with the spare
half of each pair cached, so the mapping from draw index to value does
not depend on how draws are chunked into calls.  Replaying a stream
from the same key reproduces the identical sequence bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * math.pi


def _splitmix64(z: int) -> int:
    # SplitMix64 finalizer; decorrelates nearby stream ids.
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """Deterministic uniform/Gaussian stream keyed by (seed, stream_id).

    The 128-bit Philox key is stream_id << 64 | seed, so streams with
    distinct ids are statistically independent and a stream rebuilt from
    the same key replays the identical draw sequence.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = (self.stream_id << 64) | self.seed
        self._bits = np.random.Generator(np.random.Philox(key=key))
        self._spare: float | None = None

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def substream(self, index: int) -> "RngStream":
        """Independent child stream, deterministic in (stream_id, index)."""
        child = _splitmix64(self.stream_id ^ _splitmix64(int(index) & _MASK64))
        return RngStream(self.seed, child)

    def uniforms(self, n: int) -> np.ndarray:
        """n independent uniforms on [0, 1)."""
        if n < 0:
            raise ValueError(f"draw count must be non-negative, got {n}")
        return self._bits.random(int(n))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        """Uniform draw(s) on [low, high)."""
        return low + (high - low) * self._bits.random(size)

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of range(n)."""
        return self._bits.permutation(int(n))

    def standard_normals(self, n: int) -> np.ndarray:
        """n independent N(0, 1) draws via Box-Muller.

        Uses u1 on (0, 1] so the log stays finite; the sine half of an
        odd trailing pair is kept as a spare for the next call.
        """
        n = int(n)
        if n < 0:
            raise ValueError(f"draw count must be non-negative, got {n}")
        out = np.empty(n)
        have = 0
        if self._spare is not None and n > 0:
            out[0] = self._spare
            self._spare = None
            have = 1
        need = n - have
        if need > 0:
            pairs = (need + 1) // 2
            # Each pair consumes two consecutive uniforms, so the draw
            # sequence is invariant to how calls are chunked.
            u = self._bits.random(2 * pairs)
            u1 = 1.0 - u[0::2]
            u2 = u[1::2]
            r = np.sqrt(-2.0 * np.log(u1))
            z = np.empty(2 * pairs)
            z[0::2] = r * np.cos(_TWO_PI * u2)
            z[1::2] = r * np.sin(_TWO_PI * u2)
            out[have:] = z[:need]
            if need % 2 == 1:
                self._spare = float(z[need])
        return out

    def normals(self, shape, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """Array of N(mean, std**2) draws with the given shape."""
        if isinstance(shape, int):
            shape = (shape,)
        size = 1
        for dim in shape:
            size *= int(dim)
        flat = self.standard_normals(size)
        return (mean + std * flat).reshape(shape)


def gaussian(stream: RngStream, mean: float, std: float) -> float:
    """One draw from N(mean, std**2); std == 0 returns mean exactly."""
    mean = float(mean)
    std = float(std)
    if not math.isfinite(mean):
        raise ValueError(f"mean must be finite, got {mean}")
    if not math.isfinite(std) or std < 0.0:
        raise ValueError(f"std must be finite and non-negative, got {std}")
    if std == 0.0:
        return mean
    return mean + std * float(stream.standard_normals(1)[0])


def matrix(data) -> np.ndarray:
    """Coerce data to the library's matrix format: 2-D C-order float64.

    Raises ValueError if the result is not 2-D or contains non-finite
    entries.
    """
    a = np.ascontiguousarray(np.asarray(data, dtype=np.float64))
    if a.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got ndim={a.ndim}")
    if not np.isfinite(a).all():
        raise ValueError("matrix contains non-finite entries")
    return a


def _check_2d(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={a.ndim}")
    return a


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit inner-dimension check."""
    a = _check_2d(a, "left operand")
    b = _check_2d(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"matmul dimension mismatch: {a.shape} x {b.shape}"
        )
    return a @ b


def elementwise(a, b, op: str) -> np.ndarray:
    """Elementwise combine of two same-shape matrices.

    op is one of 'add', 'sub', 'hadamard'.
    """
    a = _check_2d(a, "left operand")
    b = _check_2d(b, "right operand")
    if a.shape != b.shape:
        raise ValueError(
            f"elementwise shape mismatch: {a.shape} vs {b.shape}"
        )
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "hadamard":
        return a * b
    raise ValueError(f"unknown elementwise op '{op}'")
