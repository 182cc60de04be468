"""
Streaming moments, Kolmogorov-Smirnov statistic and quadrature oracles.
"""

import math
import logging
import warnings
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field
from scipy import integrate, stats as sps

from .errors import EmptyInput, NoConvergence
from .samplers import SamplePair

logger = logging.getLogger(__name__)

# Asymptotic 1% critical value of sqrt(n) * D
KS_CRITICAL_1PCT = 1.6276

_QUAD_LIMIT = 200


class SummaryStats(BaseModel):
    """
    Single-pass means, variances and covariance of (y1, y2) pairs.

    Co-moments are updated with Welford's scheme; `merge` combines two
    accumulators (Chan et al.) so shards can be summarized independently.
    Variances and covariance use the unbiased (n - 1) normalization.
    """

    n: int = 0
    mean1: float = 0.0
    mean2: float = 0.0
    m2_1: float = 0.0
    m2_2: float = 0.0
    c12: float = 0.0

    def update(self, y1: float, y2: float) -> "SummaryStats":
        self.n += 1
        d1 = y1 - self.mean1
        d2 = y2 - self.mean2
        self.mean1 += d1 / self.n
        self.mean2 += d2 / self.n
        self.m2_1 += d1 * (y1 - self.mean1)
        self.m2_2 += d2 * (y2 - self.mean2)
        self.c12 += d1 * (y2 - self.mean2)
        return self

    def merge(self, other: "SummaryStats") -> "SummaryStats":
        if other.n == 0:
            return self
        if self.n == 0:
            self.n, self.mean1, self.mean2 = other.n, other.mean1, other.mean2
            self.m2_1, self.m2_2, self.c12 = other.m2_1, other.m2_2, other.c12
            return self
        n = self.n + other.n
        d1 = other.mean1 - self.mean1
        d2 = other.mean2 - self.mean2
        weight = self.n * other.n / n
        self.m2_1 += other.m2_1 + d1 * d1 * weight
        self.m2_2 += other.m2_2 + d2 * d2 * weight
        self.c12 += other.c12 + d1 * d2 * weight
        self.mean1 += d1 * other.n / n
        self.mean2 += d2 * other.n / n
        self.n = n
        return self

    def update_batch(self, y1: np.ndarray, y2: np.ndarray) -> "SummaryStats":
        """Fold a whole array batch in with one merge."""
        y1 = np.asarray(y1, dtype=np.float64)
        y2 = np.asarray(y2, dtype=np.float64)
        if y1.size == 0:
            return self
        mean1 = float(y1.mean())
        mean2 = float(y2.mean())
        d1 = y1 - mean1
        d2 = y2 - mean2
        batch = SummaryStats(
            n=int(y1.size),
            mean1=mean1,
            mean2=mean2,
            m2_1=float(d1 @ d1),
            m2_2=float(d2 @ d2),
            c12=float(d1 @ d2),
        )
        return self.merge(batch)

    @property
    def var1(self) -> float:
        return self.m2_1 / (self.n - 1) if self.n > 1 else math.nan

    @property
    def var2(self) -> float:
        return self.m2_2 / (self.n - 1) if self.n > 1 else math.nan

    @property
    def cov(self) -> float:
        return self.c12 / (self.n - 1) if self.n > 1 else math.nan

    @property
    def corr_defined(self) -> bool:
        return self.n > 1 and self.m2_1 > 0 and self.m2_2 > 0

    @property
    def corr(self) -> float:
        """Pearson correlation; NaN when either variance is zero."""
        if not self.corr_defined:
            return math.nan
        return self.c12 / math.sqrt(self.m2_1 * self.m2_2)


def accumulate(stats: SummaryStats, pair: SamplePair) -> SummaryStats:
    return stats.update(pair.y1, pair.y2)


def pearson_standard_error(y1, y2) -> float:
    """
    Delta-method standard error of the sample Pearson correlation.

    Built from the standardized fourth-order co-moments, so it stays valid
    for skewed marginals; for bivariate normal data it reduces to
    (1 - rho**2) / sqrt(n).
    """
    y1 = np.asarray(y1, dtype=np.float64)
    y2 = np.asarray(y2, dtype=np.float64)
    if y1.size < 2:
        raise EmptyInput("standard error needs at least two pairs")
    a = (y1 - y1.mean()) / y1.std()
    b = (y2 - y2.mean()) / y2.std()
    rho = float(np.mean(a * b))
    m40 = np.mean(a**4)
    m04 = np.mean(b**4)
    m22 = np.mean(a * a * b * b)
    m31 = np.mean(a**3 * b)
    m13 = np.mean(a * b**3)
    variance = rho**2 / 4.0 * (m40 + m04 + 2.0 * m22) - rho * (m31 + m13) + m22
    return math.sqrt(max(float(variance), 0.0) / y1.size)


class KsResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    statistic: float
    n: int

    @computed_field
    @property
    def critical_1pct(self) -> float:
        return KS_CRITICAL_1PCT / math.sqrt(self.n)

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_1pct


def ks_statistic(samples, cdf: Callable) -> KsResult:
    """
    One-sample KS distance max_i max(i/n - F(x_i), F(x_i) - (i-1)/n).

    `cdf` must accept a numpy array.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("KS statistic needs at least one sample")
    result = sps.kstest(x, cdf)
    return KsResult(statistic=float(result.statistic), n=int(x.size))


def quad_1d(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """
    Adaptive Gauss-Kronrod integration (QUADPACK qags / qagi).

    The qags extrapolation handles integrable endpoint singularities such as
    ln x at 0; infinite limits are mapped by qagi.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, error = integrate.quad(f, a, b, epsabs=tol, epsrel=0.0, limit=_QUAD_LIMIT)
        except integrate.IntegrationWarning as exc:
            raise NoConvergence(f"quad_1d on [{a}, {b}] missed tol={tol}: {exc}") from exc
    logger.debug(f"quad_1d [{a}, {b}] = {value} (error estimate {error:.2e})")
    return float(value)


def quad_2d(
    f: Callable[[float, float], float],
    x_low: float,
    x_high: float,
    y_low: Callable[[float], float],
    y_high: Callable[[float], float],
    tol: float = 1e-8,
) -> float:
    """
    Integrate f(x, y) over x_low < x < x_high, y_low(x) < y < y_high(x).

    Inner integrals near integrable singularities may warn about their own
    tolerance; those warnings are logged, not raised, and the caller judges
    the result.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, error = integrate.dblquad(
            lambda y, x: f(x, y), x_low, x_high, y_low, y_high,
            epsabs=tol, epsrel=0.0,
        )
    if caught:
        logger.warning(f"quad_2d: {len(caught)} inner integration warning(s), last: {caught[-1].message}")
    logger.debug(f"quad_2d = {value} (error estimate {error:.2e})")
    return float(value)
