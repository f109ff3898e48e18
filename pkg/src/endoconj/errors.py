"""Exception hierarchy.

Input problems subclass :class:`ValueError`; failures of a numerical stage
subclass :class:`NumericalFailure`. The CLI maps the first to exit code 1
and the second to exit code 2.
"""


class EndoconjError(Exception):
    pass


class InputError(EndoconjError, ValueError):
    pass


class DimensionError(InputError):
    pass


class PreconditionError(InputError):
    pass


class ContainmentError(InputError):
    """A map fails the row-wise l1 containment certificate."""


class NumericalFailure(EndoconjError, ArithmeticError):
    pass


class SingularError(NumericalFailure):
    pass


class ConvergenceError(NumericalFailure):
    pass


class FitError(NumericalFailure):
    pass


class InsufficientCoverage(NumericalFailure):
    """A tabulated semigroup map was queried on an element it does not list."""


class StageError(NumericalFailure):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
