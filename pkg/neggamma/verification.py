"""
Monte Carlo verification of a plan.

Draws a batch, compares the empirical moments and correlation against the
closed forms, and runs KS tests of both marginals against their gamma CDFs.
"""

import math
import logging

from pydantic import BaseModel

from .errors import DomainError
from .model import PlanM1, PlanM2
from .samplers import BivariateUniformMethod, sample_sharded
from .stats import SummaryStats, ks_statistic, pearson_standard_error

logger = logging.getLogger(__name__)

# Moment and correlation gates are this many standard errors wide
GATE_SIGMAS = 4.0


class Moments(BaseModel):
    mean1: float
    mean2: float
    var1: float
    var2: float
    corr: float


class KsGates(BaseModel):
    d1: float
    d2: float
    critical: float


class VerificationReport(BaseModel):
    plan: dict
    count: int
    seed: int
    empirical: Moments
    theoretical: Moments
    tolerances: Moments
    ks: KsGates
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def document(self) -> dict:
        body = self.model_dump()
        body["pass"] = self.passed
        return body


def _theoretical(plan: PlanM1 | PlanM2) -> Moments:
    first, second = plan.marginals()
    return Moments(
        mean1=first.mean,
        mean2=second.mean,
        var1=first.variance,
        var2=second.variance,
        corr=plan.rho_theoretical,
    )


def _tolerances(plan: PlanM1 | PlanM2, count: int, corr_se: float) -> Moments:
    """
    Gate widths for every compared quantity.

    Moment gates use the gamma closed forms; the correlation gate uses the
    sample's delta-method standard error `corr_se`.
    """
    first, second = plan.marginals()
    root_n = math.sqrt(count)

    def _var_se(shape: float, variance: float) -> float:
        # Var(s^2) ~ sigma^4 (2 + excess kurtosis) / n, excess kurtosis 6/shape
        return variance * math.sqrt(2.0 + 6.0 / shape) / root_n

    return Moments(
        mean1=GATE_SIGMAS * math.sqrt(first.variance) / root_n,
        mean2=GATE_SIGMAS * math.sqrt(second.variance) / root_n,
        var1=GATE_SIGMAS * _var_se(first.shape, first.variance),
        var2=GATE_SIGMAS * _var_se(second.shape, second.variance),
        corr=GATE_SIGMAS * corr_se,
    )


def _compute_failures(
    empirical: Moments, theoretical: Moments, tolerances: Moments, ks: KsGates
) -> list[str]:
    failures = []
    for name in Moments.model_fields:
        seen = getattr(empirical, name)
        expected = getattr(theoretical, name)
        width = getattr(tolerances, name)
        # NaN fails
        if not abs(seen - expected) <= width:
            failures.append(f"{name}: |{seen:.6f} - {expected:.6f}| > {width:.6f}")
    for name in ("d1", "d2"):
        if not getattr(ks, name) < ks.critical:
            failures.append(f"ks {name}={getattr(ks, name):.6f} >= {ks.critical:.6f}")
    return failures


async def run_verification(
    plan: PlanM1 | PlanM2,
    count: int,
    seed: int,
    *,
    stream_id: int = 0,
    shard_size: int | None = None,
    bivariate: BivariateUniformMethod = BivariateUniformMethod.CONDITIONAL_INVERSION,
    plan_document: dict | None = None,
) -> VerificationReport:
    if count < 2:
        raise DomainError(f"verification needs at least 2 pairs, got {count}")
    y1, y2 = await sample_sharded(
        plan, count, seed, stream_id=stream_id, shard_size=shard_size, bivariate=bivariate
    )
    summary = SummaryStats().update_batch(y1, y2)
    empirical = Moments(
        mean1=summary.mean1,
        mean2=summary.mean2,
        var1=summary.var1,
        var2=summary.var2,
        corr=summary.corr,
    )

    first, second = plan.marginals()
    ks1 = ks_statistic(y1, first.cdf)
    ks2 = ks_statistic(y2, second.cdf)
    ks = KsGates(d1=ks1.statistic, d2=ks2.statistic, critical=ks1.critical_1pct)

    theoretical = _theoretical(plan)
    tolerances = _tolerances(plan, count, pearson_standard_error(y1, y2))
    failures = _compute_failures(empirical, theoretical, tolerances, ks)

    logger.info(
        f"Verification: n={count}, corr {summary.corr:.6f} vs {plan.rho_theoretical:.6f}, "
        f"KS d1={ks.d1:.5f} d2={ks.d2:.5f} (critical {ks.critical:.5f}), "
        f"{'pass' if not failures else f'{len(failures)} failure(s)'}"
    )
    return VerificationReport(
        plan=plan_document if plan_document is not None else plan.model_dump(),
        count=count,
        seed=seed,
        empirical=empirical,
        theoretical=theoretical,
        tolerances=tolerances,
        ks=ks,
        failures=failures,
    )
