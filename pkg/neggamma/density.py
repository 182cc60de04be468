"""
Joint density of the r = s = 1 antithetic pair and the special functions
used by the samplers and the goodness-of-fit gates.

With Y1 = X0 - ln U and Y2 = X0 - ln(1 - U), inverting gives

    u  = 1 / (1 + exp(y1 - y2))
    x0 = y1 - ln(1 + exp(y1 - y2))

and the density is x0**(alpha0 - 1) / (Gamma(alpha0) * (exp(y1) + exp(y2)))
on y1 > 0, y2 > y1 - ln(exp(y1) - 1). The 1/Gamma(alpha0) factor makes the
density integrate to one for every alpha0; for alpha0 = 1 it is 1.

Everything is evaluated in log space so y values in the hundreds neither
overflow nor lose the tail.
"""

import logging

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, PositiveFloat
from scipy import special

from .errors import DomainError

logger = logging.getLogger(__name__)


class JointDensityParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha0: PositiveFloat


def _scalar_or_array(value: np.ndarray):
    return float(value) if np.ndim(value) == 0 else value


def support_boundary(y1):
    """y1 - ln(exp(y1) - 1), written as -ln(1 - exp(-y1))."""
    y1 = np.asarray(y1, dtype=np.float64)
    if np.any(y1 <= 0):
        raise DomainError("support boundary is defined for y1 > 0 only")
    # expm1 near 0, log1p in the tail
    with np.errstate(divide="ignore"):
        boundary = np.where(
            y1 > np.log(2.0), -np.log1p(-np.exp(-y1)), -np.log(-np.expm1(-y1))
        )
    return _scalar_or_array(boundary)


def _log_density(y1: np.ndarray, y2: np.ndarray, alpha0: float) -> np.ndarray:
    # x0 = y1 - log(1 + exp(y1 - y2)), computed by log-sum-exp
    x0 = y1 - np.logaddexp(0.0, y1 - y2)
    inside = (y1 > 0) & (x0 > 0)
    safe_x0 = np.where(inside, x0, 1.0)
    log_f = (
        (alpha0 - 1.0) * np.log(safe_x0)
        - special.gammaln(alpha0)
        - np.logaddexp(y1, y2)
    )
    return np.where(inside, log_f, -np.inf)


def joint_density_r1s1(y1, y2, params: JointDensityParams):
    """
    Joint density of (Y1, Y2) for r = s = 1; zero outside the support.

    Accepts scalars or broadcastable arrays.
    """
    y1, y2 = np.broadcast_arrays(
        np.asarray(y1, dtype=np.float64), np.asarray(y2, dtype=np.float64)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.exp(_log_density(y1, y2, params.alpha0))
    return _scalar_or_array(value)


def integral_identity(a: float, b: float) -> float:
    """Closed form of the integral of 1/(a + e^x) over [b, inf)."""
    if a <= 0:
        raise DomainError(f"a must be positive, got {a}")
    log_a = np.log(a)
    if b > log_a:
        # (-b + ln(a + e^b)) / a = log1p(a e^-b) / a
        return float(np.log1p(a * np.exp(-b)) / a)
    return float((log_a - b + np.log1p(np.exp(b - log_a))) / a)


def log_gamma(x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(x > 0)):
        raise DomainError("log_gamma is defined for x > 0 only")
    return _scalar_or_array(special.gammaln(x))


def reg_inc_gamma_p(shape: float, x):
    """Regularized lower incomplete gamma P(shape, x), the G(1, shape) CDF."""
    if not shape > 0:
        raise DomainError(f"shape must be positive, got {shape}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(x >= 0)):
        raise DomainError("reg_inc_gamma_p needs x >= 0")
    return _scalar_or_array(special.gammainc(shape, x))


def gamma_pdf(x, shape: float, rate: float = 1.0):
    if not (shape > 0 and rate > 0):
        raise DomainError(f"need shape > 0 and rate > 0, got {shape}, {rate}")
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_f = (
            shape * np.log(rate)
            + (shape - 1.0) * np.log(np.where(x > 0, x, 1.0))
            - rate * x
            - special.gammaln(shape)
        )
    return _scalar_or_array(np.where(x > 0, np.exp(log_f), 0.0))


def gamma_cdf(x, shape: float, rate: float = 1.0):
    if not rate > 0:
        raise DomainError(f"rate must be positive, got {rate}")
    x = np.asarray(x, dtype=np.float64)
    return reg_inc_gamma_p(shape, np.maximum(x, 0.0) * rate)


def density_grid(alpha0: float, y1_max: float, y2_max: float, step: float) -> pd.DataFrame:
    """Evaluate the r = s = 1 density on the lattice k*step, zeros included."""
    if not alpha0 > 0:
        raise DomainError(f"alpha0 must be positive, got {alpha0}")
    if not step > 0:
        raise DomainError(f"step must be positive, got {step}")
    if y1_max < 0 or y2_max < 0:
        raise DomainError("grid limits must be non-negative")
    params = JointDensityParams(alpha0=alpha0)

    y1_axis = np.arange(int(np.floor(y1_max / step + 1e-9)) + 1) * step
    y2_axis = np.arange(int(np.floor(y2_max / step + 1e-9)) + 1) * step
    y1, y2 = np.meshgrid(y1_axis, y2_axis, indexing="ij")
    f = np.asarray(joint_density_r1s1(y1, y2, params))
    logger.info(f"Density grid: {y1.size} points, alpha0={alpha0}")

    return pd.DataFrame({"y1": y1.ravel(), "y2": y2.ravel(), "f": f.ravel()})
