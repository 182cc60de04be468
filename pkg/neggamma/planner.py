"""
Inverse problems: turn a target (m, n, rho0) into a sampling plan.

Method 1 has a discrete set of attainable correlations (r and s must be
integers), so it offers an `exact` mode that insists on hitting rho0 and a
`nearest` mode that scans the admissible r window. Method 2 hits any rho0
above its attainable bound exactly by tuning theta.
"""

import math
import logging
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from .errors import DomainError, Infeasible, NotRepresentable
from .model import (
    C,
    PlanM1,
    PlanM2,
    TargetSpec,
    m1_window,
    rho_m1,
    rho_m1_from_shapes,
    rho_m2_from_shapes,
    rho_m2_lower_bound,
)

logger = logging.getLogger(__name__)

# Integrality tolerance on r* in exact mode
R_TOL = 1e-6
# Targets are quoted to four decimals: exact mode accepts a rounded r whose
# correlation matches rho0 within half a unit of the last digit, and the
# lower-bound check allows the same slack
RHO_TOL = 5e-5
_SNAP = 1e-9

# Largest negative value reported as the open upper end of the Method 2 range
M2_RHO_MAX = -(2.0**-52)

# r values and the n - m offsets of the reference Method 1 grid
_TABLE_R = (2, 5, 8, 12)
_TABLE_OFFSETS = (1, 3, 6)


class Method(int, Enum):
    M1 = 1
    M2 = 2


class SolveMode(str, Enum):
    EXACT = "exact"
    NEAREST = "nearest"


class FeasibilityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: Method
    m: float
    n: float
    rho_min: float
    rho_max: float = Field(le=0.0)
    notes: str = ""


class TableRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: int
    m: int
    n: int
    rho: float


def _is_integral(value: float) -> bool:
    return abs(value - round(value)) <= _SNAP


def _m1_candidates(m: float, n: float) -> list[tuple[int, float]]:
    """(r, rho) for every admissible integer r of Method 1."""
    if not _is_integral(n - m):
        raise NotRepresentable(
            f"Method 1 needs n - m to be an integer (s = n - m + r), got m={m}, n={n}"
        )
    candidates = []
    for r in m1_window(m):
        alpha0 = m - r
        s = round(n - alpha0)
        if alpha0 < 0 or s < r:
            continue
        candidates.append((r, rho_m1(alpha0, r, s)))
    return candidates


def _m1_plan(m: float, n: float, r: int) -> PlanM1:
    alpha0 = m - r
    if abs(alpha0) <= _SNAP:
        alpha0 = 0.0
    return PlanM1(r=r, s=round(n - alpha0), alpha0=alpha0)


def feasibility(method: Method | int, m: float, n: float) -> FeasibilityReport:
    """Report the attainable negative correlation range for shapes m <= n."""
    method = Method(method)
    if m > n:
        raise DomainError(f"need m <= n, got m={m}, n={n}")

    if method is Method.M1:
        candidates = _m1_candidates(m, n)
        if not candidates:
            raise Infeasible(f"Method 1: no integer r satisfies r <= {m} < r(1 - c)")
        rhos = [rho for _, rho in candidates]
        listing = ", ".join(f"r={r}: {rho:.4f}" for r, rho in candidates)
        return FeasibilityReport(
            method=method,
            m=m,
            n=n,
            rho_min=min(rhos),
            rho_max=max(rhos),
            notes=f"attainable values {listing}",
        )

    if m < 6 or not (_is_integral(m) and _is_integral(n)):
        raise Infeasible(f"Method 2 needs integer shapes with m >= 6, got m={m}, n={n}")
    bound = rho_m2_lower_bound(m, n)
    return FeasibilityReport(
        method=method,
        m=m,
        n=n,
        rho_min=bound,
        rho_max=M2_RHO_MAX,
        notes="every rho0 in [rho_min, 0) is attained exactly; the upper end 0 is open",
    )


def solve_m1(spec: TargetSpec, mode: SolveMode | str = SolveMode.EXACT) -> PlanM1:
    """
    Find a Method 1 plan for `spec`.

    `exact` inverts the shape form of the correlation for r and requires an
    integral answer; `nearest` returns the admissible plan whose correlation
    is closest to rho0 (ties go to the smaller r).
    """
    mode = SolveMode(mode)
    m, n, rho0 = spec.m, spec.n, spec.rho0
    if m < 1:
        raise Infeasible(f"Method 1 needs m >= 1, got m={m}")

    report = feasibility(Method.M1, m, n)
    if rho0 < report.rho_min - RHO_TOL:
        raise Infeasible(
            f"rho0={rho0} is below the attainable Method 1 bound "
            f"{report.rho_min:.6f} for m={m}, n={n}",
            bound=report.rho_min,
        )
    candidates = dict(_m1_candidates(m, n))

    if mode is SolveMode.NEAREST:
        best_r = None
        for r, rho in candidates.items():
            if best_r is None or abs(rho - rho0) < abs(candidates[best_r] - rho0):
                best_r = r
        plan = _m1_plan(m, n, best_r)
        logger.info(
            f"Method 1 nearest: r={plan.r}, s={plan.s}, alpha0={plan.alpha0}, "
            f"rho={plan.rho_theoretical:.6f} (target {rho0})"
        )
        return plan

    r_star = (m - rho0 * math.sqrt(m * n)) / (1.0 - C)
    r = round(r_star)
    if r not in candidates:
        raise NotRepresentable(
            f"r*={r_star:.6f} for rho0={rho0} has no admissible integer neighbour "
            f"(window {sorted(candidates)})"
        )
    if abs(r_star - r) > R_TOL and abs(candidates[r] - rho0) > RHO_TOL:
        raise NotRepresentable(
            f"r*={r_star:.6f} is not an integer; nearest admissible r={r} gives "
            f"rho={candidates[r]:.4f} instead of {rho0}"
        )
    plan = _m1_plan(m, n, r)
    logger.info(f"Method 1 exact: r*={r_star:.6f} -> r={plan.r}, s={plan.s}, alpha0={plan.alpha0}")
    return plan


def solve_m2(spec: TargetSpec) -> PlanM2:
    """
    Find the Method 2 plan hitting rho0 exactly.

    y = 4m - 4 rho0 sqrt(mn), r = ceil(y / 5), theta = 4 - y / r,
    alpha0 = m - r, s = n - alpha0.
    """
    m, n, rho0 = spec.m, spec.n, spec.rho0
    if rho0 >= 0:
        raise DomainError(f"target correlation must be negative, got {rho0}")
    if not (_is_integral(m) and _is_integral(n)):
        raise DomainError(f"Method 2 needs integer shapes, got m={m}, n={n}")
    m, n = round(m), round(n)
    if m < 6:
        raise Infeasible(f"Method 2 needs m >= 6, got m={m}")
    bound = rho_m2_lower_bound(m, n)
    if rho0 < bound:
        raise Infeasible(
            f"rho0={rho0} is below the attainable Method 2 lower bound "
            f"{bound:.6f} for m={m}, n={n}",
            bound=bound,
        )

    y = 4.0 * m - 4.0 * rho0 * math.sqrt(m * n)
    a = y / 5.0
    r = round(a) if _is_integral(a) else math.ceil(a)
    theta = 4.0 - y / r
    if -1.0 - _SNAP < theta < -1.0:
        theta = -1.0
    alpha0 = m - r
    plan = PlanM2(r=r, s=n - alpha0, alpha0=float(alpha0), theta=theta)
    achieved = rho_m2_from_shapes(r, m, n, theta)
    if abs(achieved - rho0) > _SNAP:
        logger.warning(f"Method 2 plan reaches rho={achieved:.12f}, target {rho0}")
    logger.info(
        f"Method 2: y={y:.6f}, a={a:.6f}, r={r}, theta={theta:.6f}, "
        f"alpha0={alpha0}, s={plan.s}, rho={achieved:.6f}"
    )
    return plan


def reference_table() -> list[TableRow]:
    """
    The reference Method 1 grid: r in {2, 5, 8, 12}, every admissible m for
    that r, n = m + 1, m + 3, m + 6. Sixty rows, sorted by (r, m, n).
    """
    rows = []
    for r in _TABLE_R:
        for m in range(r, math.floor(r * (1.0 - C)) + 1):
            for offset in _TABLE_OFFSETS:
                n = m + offset
                rows.append(TableRow(r=r, m=m, n=n, rho=rho_m1_from_shapes(r, m, n)))
    return rows
