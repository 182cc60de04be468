"""
Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: Infeasible, NotRepresentable and
DomainError exit with 2, everything else with 1.
"""


class NegGammaError(Exception):
    """Base class for every error raised by neggamma."""


class DomainError(NegGammaError, ValueError):
    """An argument lies outside the domain of a formula or generator."""


class Infeasible(NegGammaError):
    """No admissible plan exists for the requested target."""

    def __init__(self, message: str, bound: float | None = None):
        super().__init__(message)
        self.bound = bound


class NotRepresentable(NegGammaError):
    """The target is attainable in principle but not with integer r, s."""


class EmptyInput(NegGammaError, ValueError):
    pass


class NoConvergence(NegGammaError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance."""
