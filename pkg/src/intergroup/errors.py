"""Exception hierarchy.

Two families matter to callers: :class:`InputError` (bad data or arguments,
CLI exit code 1) and :class:`NumericalError` (a statistic is undefined for
otherwise valid data, CLI exit code 2).
"""


class AgreementError(Exception):
    """Base class for every error raised by this package."""


class InputError(AgreementError, ValueError):
    pass


class NumericalError(AgreementError, ArithmeticError):
    pass


class OutOfScaleCode(InputError):
    pass


class EmptyGroup(InputError):
    pass


class TooFewSubjects(InputError):
    pass


class MissingValue(InputError):
    pass


class LengthMismatch(InputError):
    pass


class InvalidK(InputError):
    pass


class SingleRater(InputError):
    """A multi-rater statistic was asked for with fewer than two raters."""


class SingleRaterGroup(SingleRater):
    pass


class ParseError(InputError):
    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class UnknownColumn(InputError):
    pass


class DuplicateSubjectId(InputError):
    pass


class EmptyInput(InputError):
    pass


class NoBootstrapData(InputError):
    pass


class DegenerateMarginals(NumericalError):
    pass


class DegenerateExpected(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass


class TooFewVectors(NumericalError):
    pass


class AllZeroVectors(NumericalError):
    pass


class ZeroVariance(NumericalError):
    pass


class SubsampleDegenerate(NumericalError):
    def __init__(self, message, subject=None):
        super().__init__(message)
        self.subject = subject
