"""Sampling, planning and verification of negatively correlated gamma pairs."""

from .errors import DomainError, EmptyInput, Infeasible, NoConvergence, NotRepresentable
from .model import PlanM1, PlanM2, TargetSpec
from .planner import feasibility, solve_m1, solve_m2
from .rng import RngStream, substream
from .samplers import BivariateUniformMethod, SamplePair, sample_m1, sample_m2

__all__ = [
    "BivariateUniformMethod",
    "DomainError",
    "EmptyInput",
    "Infeasible",
    "NoConvergence",
    "NotRepresentable",
    "PlanM1",
    "PlanM2",
    "RngStream",
    "SamplePair",
    "TargetSpec",
    "feasibility",
    "sample_m1",
    "sample_m2",
    "solve_m1",
    "solve_m2",
    "substream",
]
