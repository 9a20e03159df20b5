"""Exception hierarchy shared by all modules.

Domain errors map to CLI exit code 2, budget errors to exit code 3.
"""


class ThetaNormError(Exception):
    """Base class for every named error raised by the library."""


class DomainError(ThetaNormError):
    pass


class BudgetError(ThetaNormError):
    pass


class NotSymmetric(DomainError):
    pass


class OddDiagonal(DomainError):
    pass


class NotPositiveDefinite(DomainError):
    pass


class ReductionFailure(DomainError):
    pass


class PrecisionTooLow(DomainError):
    pass


class MissingPrime(DomainError):
    pass


class MethodInvalid(DomainError):
    pass


class StabilizationOverflow(DomainError):
    pass


class DimensionTooSmall(DomainError):
    pass


class NotDiagonal(DomainError):
    pass


class PivotFailure(DomainError):
    pass


class GammaZeroN(DomainError):
    pass


class GenusMismatch(DomainError):
    pass


class TruncationInsufficient(DomainError):
    pass


class DensityZeroDenominator(DomainError):
    pass


class EmptyWindow(DomainError):
    pass


class BudgetExceeded(BudgetError):
    pass


class OverflowBudget(BudgetError):
    pass


class DepthBudget(BudgetError):
    pass
