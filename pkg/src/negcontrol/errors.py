"""Exception hierarchy.

Two families matter to callers: :class:`InputError` (bad files, bad
configuration, malformed specs) and :class:`AnalysisError` (the data are
well-formed but the requested analysis cannot be carried out). The CLI maps
them to exit codes 1 and 2 respectively.
"""


class NegativeControlError(Exception):
    """Base class for every error raised by this package."""


class InputError(NegativeControlError):
    """Problem with inputs, files or configuration."""


class AnalysisError(NegativeControlError):
    """The analysis itself failed on otherwise valid input."""


# -- input / configuration -------------------------------------------------


class MalformedSpec(InputError):
    pass


class MissingRole(InputError):
    pass


class InputFileNotFound(InputError, FileNotFoundError):
    pass


class NonNumericColumn(InputError):
    def __init__(self, column, row, value):
        self.column = column
        self.row = row
        self.value = value
        super().__init__(
            f"column {column!r} has non-numeric value {value!r} at data row {row}"
        )


class EmptyAfterFiltering(InputError):
    pass


class NonFiniteInput(InputError):
    pass


class MissingEdgeWeight(InputError):
    pass


# -- analysis --------------------------------------------------------------


class RankDeficient(AnalysisError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"design is rank deficient; column {column!r} is collinear")


class InsufficientRows(AnalysisError):
    pass


class ZeroVariance(AnalysisError):
    pass


class WeakProxy(AnalysisError):
    pass


class StageTwoSingular(WeakProxy):
    pass


class SingularMomentJacobian(AnalysisError):
    pass


class PositivityViolation(AnalysisError):
    pass


class DegenerateCalibration(AnalysisError):
    pass


class EmptyInversionSet(AnalysisError):
    pass


class SeriesTooShort(AnalysisError):
    pass


class TooFewControls(AnalysisError):
    pass


class NotConverged(AnalysisError):
    pass


class WeakProxyWarning(UserWarning):
    """Raised through :mod:`warnings` when proxy strength is below the warning threshold."""
