"""Exception types shared across the package."""


class LCCError(Exception):
    pass


class ZeroInverse(LCCError, ZeroDivisionError):
    pass


class DuplicateAbscissa(LCCError, ValueError):
    pass


class EmptyInput(LCCError, ValueError):
    pass


class SingularMatrix(LCCError, ValueError):
    pass


class SingularSubmatrix(SingularMatrix):
    pass


class DimensionMismatch(LCCError, ValueError):
    pass


class FieldTooSmall(LCCError, ValueError):
    pass


class InfeasibleParams(LCCError, ValueError):
    pass


class VariantMismatch(LCCError, ValueError):
    pass


class NotEnoughReturns(LCCError):
    pass


class DecodingFailure(LCCError):
    """Residual errors exceed the adversary budget."""


class BudgetViolation(LCCError, ValueError):
    pass


class StateSpaceTooLarge(LCCError, ValueError):
    pass


class OverflowRisk(LCCError, ValueError):
    pass


class ConditioningWarning(UserWarning):
    pass
