"""
Deterministic uniform streams.

Every stream is a numpy Philox4x64-10 counter-based generator (the Random123
family). The 128-bit key is built from the caller's seed and stream id,

    key = seed + stream_id * 2**64

and the 256-bit counter starts at shard * 2**192, so shards of one stream
walk disjoint counter blocks. Raw 64-bit words w are mapped onto the open
interval by

    u = ((w >> 12) + 0.5) * 2**-52

which yields values in [2**-53, 1 - 2**-53]. Both ends are exactly
representable in binary64, so -ln(u) and -ln(1 - u) are always finite.
"""

import logging

import numpy as np

from .errors import DomainError

logger = logging.getLogger(__name__)

_U64_MAX = 2**64 - 1
_SHARD_SHIFT = 192
_SCALE = 2.0**-52


def _check_u64(name: str, value: int) -> int:
    value = int(value)
    if not 0 <= value <= _U64_MAX:
        raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value}")
    return value


def words_to_uniforms(words: np.ndarray) -> np.ndarray:
    """Map raw uint64 words onto (0, 1)."""
    return ((words >> np.uint64(12)).astype(np.float64) + 0.5) * _SCALE


class RngStream:
    """
    A seedable stream of uniforms on (0, 1).

    Not safe to advance from several threads at once; give each worker its
    own stream (see `substream`).
    """

    def __init__(self, seed: int, stream_id: int = 0, shard: int = 0):
        self.seed = _check_u64("seed", seed)
        self.stream_id = _check_u64("stream_id", stream_id)
        self.shard = _check_u64("shard", shard)
        self._bitgen = np.random.Philox(
            key=self.seed + (self.stream_id << 64),
            counter=self.shard << _SHARD_SHIFT,
        )
        self._draws = 0

    def __repr__(self) -> str:
        return (
            f"RngStream(seed={self.seed}, stream_id={self.stream_id}, "
            f"shard={self.shard}, draws={self._draws})"
        )

    @property
    def draws(self) -> int:
        """Number of uniforms consumed so far."""
        return self._draws

    def uniforms(self, size: int | tuple[int, ...]) -> np.ndarray:
        """Draw an array of uniforms, filled in C (row-major) order."""
        shape = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
        count = int(np.prod(shape, dtype=np.int64))
        if count == 0:
            return np.empty(shape, dtype=np.float64)
        words = self._bitgen.random_raw(count)
        self._draws += count
        return words_to_uniforms(words).reshape(shape)

    def next_uniform(self) -> float:
        self._draws += 1
        return float(words_to_uniforms(np.uint64(self._bitgen.random_raw())))


def next_uniform(stream: RngStream) -> float:
    """Advance `stream` by exactly one draw and return it."""
    return stream.next_uniform()


def substream(seed: int, stream_id: int = 0, shard: int = 0) -> RngStream:
    """
    Build the stream for (seed, stream_id).

    Distinct stream ids use distinct Philox keys; `shard` selects a disjoint
    counter block inside the same key.
    """
    stream = RngStream(seed, stream_id, shard)
    logger.debug(f"Derived {stream!r}")
    return stream
