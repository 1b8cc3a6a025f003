"""Exception hierarchy shared by all modules."""


class LelongError(Exception):
    """Base class for every error raised by the package."""


class ContractError(LelongError, ValueError):
    """A caller violated a documented precondition (shapes, counts, ranges)."""


class EvaluationError(LelongError, ArithmeticError):
    """A scalar field produced a non-finite value or derivative."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class SingularEvaluationError(EvaluationError):
    """A density was probed exactly on an annotated singular locus."""


class DomainError(LelongError, ValueError):
    """Evaluation outside the domain of a weight, e.g. log of a non-positive value."""


class RangeError(LelongError, ValueError):
    """A sublevel parameter is not below the validity radius of the weight."""


class UnsupportedOperationError(LelongError):
    """The requested operation is not available for this object."""


class CatalogLookupError(LelongError, KeyError):
    def __init__(self, name, available):
        super().__init__(f"unknown catalog entry {name!r}; available: {', '.join(available)}")
        self.name = name
        self.available = tuple(available)

    def __str__(self):
        return self.args[0]


class IntegrabilityError(LelongError):
    """A singularity annotation fails the local integrability (codimension) test."""


class BudgetExceededError(LelongError):
    """Quadrature could not reach its tolerance within the evaluation budget."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConditionCError(LelongError):
    """Condition (C) does not hold, so the requested quantity is not formed."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(LelongError):
    """Scenario configuration failed to parse or validate."""
