"""
Domain records and closed-form correlation formulas.

Shapes follow the rate parametrization: G(rate, shape) has density
rate**shape * exp(-rate*x) * x**(shape-1) / Gamma(shape) on x > 0.

Method 1 couples X1 = -sum ln U_i (i <= r) with X2 = -sum ln(1 - U_i)
(i <= s); Method 2 drives the two sums with pairs from the density
1 + theta*(1 - 2u1)*(1 - 2u2). Both add a shared shock X0 ~ G(1, alpha0).
"""

import math
from typing import ClassVar

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    computed_field,
    model_validator,
)

from .density import gamma_cdf
from .errors import DomainError

# Cov(ln U, ln(1 - U)) for U uniform
C = 1.0 - math.pi**2 / 6.0


def antithetic_log_cov() -> float:
    return C


def _check_shapes(alpha0: float, r: float, s: float) -> None:
    if alpha0 < 0:
        raise DomainError(f"alpha0 must be >= 0, got {alpha0}")
    if r <= 0 or r > s:
        raise DomainError(f"need 0 < r <= s, got r={r}, s={s}")


def _check_theta(theta: float) -> None:
    if not -1.0 <= theta <= 1.0:
        raise DomainError(f"theta must lie in [-1, 1], got {theta}")


def rho_m1(alpha0: float, r: float, s: float) -> float:
    """Correlation of (Y1, Y2) under the antithetic construction."""
    _check_shapes(alpha0, r, s)
    return (alpha0 + r * C) / math.sqrt((alpha0 + r) * (alpha0 + s))


def rho_m1_lower_bound(r: float, s: float) -> float:
    """Most negative Method 1 correlation for given r <= s (alpha0 = 0)."""
    _check_shapes(0.0, r, s)
    return rho_m1(0.0, r, s)


def rho_m1_from_shapes(r: float, m: float, n: float) -> float:
    """Method 1 correlation written in the target shapes m = alpha0 + r, n = alpha0 + s."""
    if m <= 0 or n <= 0:
        raise DomainError(f"shapes must be positive, got m={m}, n={n}")
    return (m + r * (C - 1.0)) / math.sqrt(m * n)


def m1_is_negative(alpha0: float, r: float) -> bool:
    return alpha0 + r * C < 0


def m1_window(m: float) -> list[int]:
    """Integers r with r <= m < r(1 - c)."""
    low = math.floor(m / (1.0 - C)) + 1
    return [r for r in range(max(low, 1), math.floor(m) + 1) if m < r * (1.0 - C)]


def rho_m2(alpha0: float, r: float, s: float, theta: float) -> float:
    _check_shapes(alpha0, r, s)
    _check_theta(theta)
    return (alpha0 + r * theta / 4.0) / math.sqrt((alpha0 + r) * (alpha0 + s))


def rho_m2_from_shapes(r: float, m: float, n: float, theta: float) -> float:
    _check_theta(theta)
    if m <= 0 or n <= 0:
        raise DomainError(f"shapes must be positive, got m={m}, n={n}")
    return (4.0 * m - r * (4.0 - theta)) / (4.0 * math.sqrt(m * n))


def m2_is_negative(alpha0: float, r: float, theta: float) -> bool:
    return 4.0 * alpha0 + r * theta < 0


def rho_m2_lower_bound(m: float, n: float) -> float:
    """
    Attainable Method 2 lower bound -(m - 5) / (4 sqrt(mn)).

    Derived assuming r <= m - 1 with theta = -1, hence m >= 6.
    """
    if m < 6:
        raise DomainError(f"Method 2 bound needs m >= 6, got m={m}")
    if n < m:
        raise DomainError(f"need n >= m, got m={m}, n={n}")
    return -(m - 5.0) / (4.0 * math.sqrt(m * n))


def uniform_pair_corr(theta: float) -> float:
    _check_theta(theta)
    return theta / 3.0


def log_pair_cov_m2(theta: float) -> float:
    """Cov(ln U1, ln U2) for one pair drawn from the theta density."""
    _check_theta(theta)
    return theta / 4.0


class GammaParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    rate: PositiveFloat = 1.0
    shape: PositiveFloat

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / self.rate**2

    def cdf(self, x):
        return gamma_cdf(x, self.shape, self.rate)


class TargetSpec(BaseModel):
    """Requested marginal shapes and correlation, normalized so m <= n."""

    model_config = ConfigDict(frozen=True)

    m: PositiveFloat
    n: PositiveFloat
    rho0: float = Field(gt=-1.0, lt=0.0)
    swapped: bool = False

    @model_validator(mode="after")
    def _ordered(self) -> "TargetSpec":
        if self.m > self.n:
            raise ValueError("m must not exceed n; build through TargetSpec.normalized")
        return self

    @classmethod
    def normalized(cls, m: float, n: float, rho0: float) -> "TargetSpec":
        if rho0 >= 0:
            raise DomainError(f"target correlation must be negative, got {rho0}")
        if rho0 <= -1:
            raise DomainError(f"target correlation must exceed -1, got {rho0}")
        if m <= 0 or n <= 0:
            raise DomainError(f"shapes must be positive, got m={m}, n={n}")
        if m > n:
            return cls(m=n, n=m, rho0=rho0, swapped=True)
        return cls(m=m, n=n, rho0=rho0)


class _PlanBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: PositiveInt
    s: PositiveInt
    alpha0: NonNegativeFloat = 0.0
    rate: PositiveFloat = 1.0

    @model_validator(mode="after")
    def _r_not_above_s(self):
        if self.r > self.s:
            raise ValueError(f"need r <= s, got r={self.r}, s={self.s}")
        return self

    @property
    def m(self) -> float:
        return self.alpha0 + self.r

    @property
    def n(self) -> float:
        return self.alpha0 + self.s

    def marginals(self) -> tuple[GammaParams, GammaParams]:
        return (
            GammaParams(rate=self.rate, shape=self.m),
            GammaParams(rate=self.rate, shape=self.n),
        )


class PlanM1(_PlanBase):
    method: ClassVar[int] = 1

    @computed_field
    @property
    def rho_theoretical(self) -> float:
        return rho_m1(self.alpha0, self.r, self.s)

    @property
    def negative(self) -> bool:
        return m1_is_negative(self.alpha0, self.r)


class PlanM2(_PlanBase):
    method: ClassVar[int] = 2
    theta: float = Field(ge=-1.0, le=1.0)

    @computed_field
    @property
    def rho_theoretical(self) -> float:
        return rho_m2(self.alpha0, self.r, self.s, self.theta)

    @property
    def negative(self) -> bool:
        return m2_is_negative(self.alpha0, self.r, self.theta)
