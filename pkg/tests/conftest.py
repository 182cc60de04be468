import asyncio

import numpy as np
import pytest

from neggamma.rng import substream
from neggamma.samplers import BivariateUniformMethod, sample_sharded

SEED = 20_240_601


@pytest.fixture()
def stream():
    return substream(SEED, 0)


def draw(plan, count, seed=SEED, bivariate=BivariateUniformMethod.CONDITIONAL_INVERSION):
    """Sharded batch draw, kept small per shard so 10^6-pair tests stay light."""
    return asyncio.run(sample_sharded(plan, count, seed, shard_size=100_000, bivariate=bivariate))


def pearson(x, y) -> float:
    return float(np.corrcoef(x, y)[0, 1])
