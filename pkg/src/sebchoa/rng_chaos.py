"""Seeded random streams and the chaotic maps that drive the m coefficient."""

from __future__ import annotations

import enum
import hashlib
import math
from typing import Optional

import numpy as np

_UINT64_MAX = 2**64 - 1

# Chaotic initial states are rejected into this open interval.
_INIT_LOW, _INIT_HIGH = 0.01, 0.99


class RngStream:
    """Single-owner seeded uniform source backed by PCG64.

    Two streams built from the same seed yield identical sequences. Scalar and
    vectorized draws consume the same underlying generator.
    """

    def __init__(self, seed: int):
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
        seed = int(seed)
        if not 0 <= seed <= _UINT64_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def next_uniform(self) -> float:
        return float(self._gen.random())

    def uniform(self, size=None) -> np.ndarray:
        """Draw an array of uniforms in [0, 1)."""
        return self._gen.random(size)

    def spawn(self, *keys) -> "RngStream":
        """Derive an independent stream keyed by this stream's seed and `keys`."""
        return RngStream(derive_seed(self.seed, *keys))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"


def next_uniform(stream: RngStream) -> float:
    return stream.next_uniform()


def derive_seed(master_seed: int, *keys) -> int:
    """Hash a master seed and any number of keys into a 64-bit seed.

    Used to split one experiment seed into per-cell streams, so that the seed of
    a cell depends only on its own coordinates and never on execution order.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master_seed)).encode())
    for key in keys:
        h.update(b"\x1f")
        h.update(str(key).encode())
    return int.from_bytes(h.digest(), "little")


class ChaoticMapKind(enum.Enum):
    LOGISTIC = "logistic"
    TENT = "tent"
    SINE = "sine"

    @classmethod
    def parse(cls, name: "str | ChaoticMapKind") -> "ChaoticMapKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown chaotic map {name!r}; valid maps: {valid}") from None


# Fixed points and pre-periodic values that collapse a sequence to a constant.
_DEGENERATE = {
    ChaoticMapKind.LOGISTIC: (0.25, 0.5, 0.75),
    ChaoticMapKind.TENT: (0.25, 0.5, 0.75),
    ChaoticMapKind.SINE: (0.5,),
}


def _recurrence(kind: ChaoticMapKind, x):
    if kind is ChaoticMapKind.LOGISTIC:
        return 4.0 * x * (1.0 - x)
    if kind is ChaoticMapKind.TENT:
        return np.where(x < 0.5, 2.0 * x, 2.0 * (1.0 - x))
    return np.sin(np.pi * x)


def chaotic_next(kind: "ChaoticMapKind | str", x: float) -> float:
    """Apply one step of the map's recurrence to a scalar state.

    Logistic: 4x(1-x). Tent: 2x below 0.5, else 2(1-x). Sine: sin(pi x).
    """
    kind = ChaoticMapKind.parse(kind)
    if not (math.isfinite(x) and 0.0 < x < 1.0):
        raise ValueError(f"chaotic state must lie in (0, 1), got {x!r}")
    return float(_recurrence(kind, x))


def _is_degenerate(kind: ChaoticMapKind, x: np.ndarray) -> np.ndarray:
    bad = ~((x > 0.0) & (x < 1.0))
    for point in _DEGENERATE[kind]:
        bad |= x == point
    return bad


class ChaoticMap:
    """A block of independent chaotic sequences sharing one map.

    The state array has an arbitrary shape, so one map can hold a state per
    role, chimp and dimension. States are drawn from `rng` into
    (0.01, 0.99) minus the degenerate points. Finite-precision arithmetic can
    still land a sequence on 0, 1 or a fixed point (the tent map exhausts its
    mantissa within ~55 steps); such entries are re-drawn by the same rule, so
    every value returned lies in (0, 1).
    """

    def __init__(self, kind: "ChaoticMapKind | str", shape, rng: RngStream):
        self.kind = ChaoticMapKind.parse(kind)
        self.rng = rng
        self.state = self._draw(shape)

    def _draw(self, shape) -> np.ndarray:
        out = np.empty(shape)
        todo = np.ones(shape, dtype=bool)
        while todo.any():
            n = int(todo.sum())
            draws = _INIT_LOW + (_INIT_HIGH - _INIT_LOW) * self.rng.uniform(n)
            out[todo] = draws
            todo[todo] = _is_degenerate(self.kind, draws) | (draws <= _INIT_LOW)
        return out

    def next(self) -> np.ndarray:
        """Advance every sequence one step and return a copy of the new state."""
        new = _recurrence(self.kind, self.state)
        bad = _is_degenerate(self.kind, new)
        if bad.any():
            new[bad] = self._draw(int(bad.sum()))
        self.state = new
        return new.copy()

