"""
Samplers for negatively correlated gamma pairs.

Draw order is part of the reproducibility contract. For a batch of N pairs:

  * Method 1 takes N rows of s uniforms (row-major). X1 uses the first r
    entries of a row through -ln u, X2 uses all s entries through
    -ln(1 - u).
  * Method 2 takes N*s bivariate uniform pairs. Conditional inversion
    consumes two uniforms (u1, v) per pair; acceptance-rejection consumes
    rounds of three uniforms (u1, u2, w) per still-pending pair.
  * The shock X0 ~ G(1, alpha0) follows: N rows of floor(alpha0) uniforms
    for the integer part, then rounds of two uniforms per pending draw for
    the fractional part (Ahrens-Dieter GS rejection).

Single-pair functions are batches of size one.
"""

import asyncio
import math
import logging
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import config
from .errors import DomainError
from .model import PlanM1, PlanM2
from .rng import RngStream, substream

logger = logging.getLogger(__name__)

# Below this |k| the conditional CDF is the identity
_K_EPS = 1e-12


class SamplePair(NamedTuple):
    y1: float
    y2: float


class BivariateUniformMethod(str, Enum):
    CONDITIONAL_INVERSION = "conditional_inversion"
    ACCEPTANCE_REJECTION = "acceptance_rejection"


# ---------------------------------------------------------------------------
# Shock generator
# ---------------------------------------------------------------------------

def _gs_fraction(delta: float, size: int, stream: RngStream) -> np.ndarray:
    """G(1, delta) draws for 0 < delta < 1 by Ahrens-Dieter GS rejection."""
    b = (math.e + delta) / math.e
    out = np.empty(size, dtype=np.float64)
    pending = np.arange(size)
    while pending.size:
        u = stream.uniforms((pending.size, 2))
        p = b * u[:, 0]
        low = p <= 1.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            x = np.where(low, p ** (1.0 / delta), -np.log((b - p) / delta))
            accept = np.where(low, u[:, 1] <= np.exp(-x), u[:, 1] <= x ** (delta - 1.0))
        out[pending[accept]] = x[accept]
        pending = pending[~accept]
    return out


def gamma_batch(shape: float, size: int, stream: RngStream) -> np.ndarray:
    """
    `size` independent G(1, shape) draws.

    Shape 0 returns zeros without touching the stream. The integer part is a
    sum of exponentials, the fractional part a GS rejection draw.
    """
    if shape < 0:
        raise DomainError(f"gamma shape must be >= 0, got {shape}")
    out = np.zeros(size, dtype=np.float64)
    if shape == 0 or size == 0:
        return out
    whole = math.floor(shape)
    fraction = shape - whole
    if whole:
        out += -np.log(stream.uniforms((size, whole))).sum(axis=1)
    if fraction > 0:
        out += _gs_fraction(fraction, size, stream)
    return out


def sample_gamma(shape: float, stream: RngStream) -> float:
    return float(gamma_batch(shape, 1, stream)[0])


# ---------------------------------------------------------------------------
# Bivariate uniforms with density 1 + theta (1 - 2 u1)(1 - 2 u2)
# ---------------------------------------------------------------------------

def _check_theta(theta: float) -> None:
    if not -1.0 <= theta <= 1.0:
        raise DomainError(f"theta must lie in [-1, 1], got {theta}")


def conditional_inverse(theta: float, u1, v):
    """
    Solve F(u2 | u1) = (1 + k) u2 - k u2**2 = v with k = theta (1 - 2 u1).

    Uses the conjugate form 2v / ((1 + k) + sqrt((1 + k)**2 - 4kv)) of the
    root in [0, 1], which has no cancellation for either sign of k.
    """
    u1 = np.asarray(u1, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    k = theta * (1.0 - 2.0 * u1)
    disc = np.maximum((1.0 + k) ** 2 - 4.0 * k * v, 0.0)
    u2 = 2.0 * v / ((1.0 + k) + np.sqrt(disc))
    return np.where(np.abs(k) < _K_EPS, v, u2)


def uniform_pairs_inversion(theta: float, size: int, stream: RngStream):
    _check_theta(theta)
    u = stream.uniforms((size, 2))
    return u[:, 0], conditional_inverse(theta, u[:, 0], u[:, 1])


def uniform_pairs_rejection(theta: float, size: int, stream: RngStream):
    """
    Acceptance-rejection from the uniform square with envelope 1 + |theta|.

    Returns (u1, u2, proposals); the expected acceptance rate is
    1 / (1 + |theta|).
    """
    _check_theta(theta)
    envelope = 1.0 + abs(theta)
    u1 = np.empty(size, dtype=np.float64)
    u2 = np.empty(size, dtype=np.float64)
    pending = np.arange(size)
    proposals = 0
    while pending.size:
        d = stream.uniforms((pending.size, 3))
        proposals += pending.size
        f = 1.0 + theta * (1.0 - 2.0 * d[:, 0]) * (1.0 - 2.0 * d[:, 1])
        accept = d[:, 2] * envelope <= f
        slots = pending[accept]
        u1[slots] = d[accept, 0]
        u2[slots] = d[accept, 1]
        pending = pending[~accept]
    if size:
        logger.debug(f"Acceptance-rejection: theta={theta}, rate={size / proposals:.4f}")
    return u1, u2, proposals


def uniform_pairs(
    theta: float,
    size: int,
    stream: RngStream,
    method: BivariateUniformMethod = BivariateUniformMethod.CONDITIONAL_INVERSION,
):
    method = BivariateUniformMethod(method)
    if method is BivariateUniformMethod.ACCEPTANCE_REJECTION:
        u1, u2, _ = uniform_pairs_rejection(theta, size, stream)
        return u1, u2
    return uniform_pairs_inversion(theta, size, stream)


def sample_bivariate_uniform(
    theta: float,
    method: BivariateUniformMethod,
    stream: RngStream,
) -> tuple[float, float]:
    u1, u2 = uniform_pairs(theta, 1, stream, method)
    return float(u1[0]), float(u2[0])


# ---------------------------------------------------------------------------
# Pair samplers
# ---------------------------------------------------------------------------

def _scale(y1: np.ndarray, y2: np.ndarray, rate: float):
    if not rate > 0:
        raise DomainError(f"rate must be positive, got {rate}")
    if rate == 1.0:
        return y1, y2
    return y1 / rate, y2 / rate


def scale_pair(pair: SamplePair, rate: float) -> SamplePair:
    """Map G(1, .) marginals onto G(rate, .); correlation is unchanged."""
    y1, y2 = _scale(pair.y1, pair.y2, rate)
    return SamplePair(float(y1), float(y2))


def sample_m1_batch(plan: PlanM1, size: int, stream: RngStream):
    u = stream.uniforms((size, plan.s))
    x1 = -np.log(u[:, : plan.r]).sum(axis=1)
    x2 = -np.log1p(-u).sum(axis=1)
    x0 = gamma_batch(plan.alpha0, size, stream)
    return _scale(x0 + x1, x0 + x2, plan.rate)


def sample_m2_batch(
    plan: PlanM2,
    size: int,
    stream: RngStream,
    bivariate: BivariateUniformMethod = BivariateUniformMethod.CONDITIONAL_INVERSION,
):
    u1, u2 = uniform_pairs(plan.theta, size * plan.s, stream, bivariate)
    u1 = u1.reshape(size, plan.s)
    u2 = u2.reshape(size, plan.s)
    x1 = -np.log(u1[:, : plan.r]).sum(axis=1)
    x2 = -np.log(u2).sum(axis=1)
    x0 = gamma_batch(plan.alpha0, size, stream)
    return _scale(x0 + x1, x0 + x2, plan.rate)


def sample_batch(
    plan: PlanM1 | PlanM2,
    size: int,
    stream: RngStream,
    bivariate: BivariateUniformMethod = BivariateUniformMethod.CONDITIONAL_INVERSION,
) -> tuple[np.ndarray, np.ndarray]:
    if size < 0:
        raise DomainError(f"sample size must be >= 0, got {size}")
    if isinstance(plan, PlanM2):
        return sample_m2_batch(plan, size, stream, bivariate)
    return sample_m1_batch(plan, size, stream)


def sample_m1(plan: PlanM1, stream: RngStream) -> SamplePair:
    y1, y2 = sample_m1_batch(plan, 1, stream)
    return SamplePair(float(y1[0]), float(y2[0]))


def sample_m2(
    plan: PlanM2,
    stream: RngStream,
    bivariate: BivariateUniformMethod = BivariateUniformMethod.CONDITIONAL_INVERSION,
) -> SamplePair:
    y1, y2 = sample_m2_batch(plan, 1, stream, bivariate)
    return SamplePair(float(y1[0]), float(y2[0]))


# ---------------------------------------------------------------------------
# Sharded batches
# ---------------------------------------------------------------------------

async def sample_sharded(
    plan: PlanM1 | PlanM2,
    count: int,
    seed: int,
    *,
    stream_id: int = 0,
    shard_size: int | None = None,
    bivariate: BivariateUniformMethod = BivariateUniformMethod.CONDITIONAL_INVERSION,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Draw `count` pairs split into shards of `shard_size`, shard i on
    substream(seed, stream_id, shard=i). Shards run in worker threads and
    are concatenated in shard order, so the output depends only on
    (seed, stream_id, plan, count, shard_size).
    """
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    shard_size = shard_size or config.shard_size()
    shards = [
        (index, min(shard_size, count - start))
        for index, start in enumerate(range(0, count, shard_size))
    ]
    logger.info(f"Sampling {count} pairs in {len(shards)} shard(s) of <= {shard_size}")

    def _draw(index: int, size: int):
        return sample_batch(plan, size, substream(seed, stream_id, shard=index), bivariate)

    results = await asyncio.gather(
        *(asyncio.to_thread(_draw, index, size) for index, size in shards)
    )
    if not results:
        return np.empty(0), np.empty(0)
    y1 = np.concatenate([part[0] for part in results])
    y2 = np.concatenate([part[1] for part in results])
    return y1, y2
