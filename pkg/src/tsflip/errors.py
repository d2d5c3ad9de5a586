"""Exception hierarchy for tsflip."""


class FlipError(ValueError):
    """Base class for all errors raised by tsflip."""


class ParseError(FlipError):
    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class EmptySeriesError(FlipError):
    pass


class ConstantSeriesError(FlipError):
    pass


class RankDeficiencyError(FlipError):
    pass


class NonstationaryModelError(FlipError):
    pass


class InsufficientDataError(FlipError):
    pass


class ZeroDenominatorError(FlipError):
    pass


class PerfectPredictionError(FlipError):
    """The attacker's series predicts the sensitive series without error."""


class ZeroMassError(FlipError):
    pass


class ShapeBelowOneError(FlipError):
    pass


class WeightsNotNormalizedError(FlipError):
    pass


class DegenerateBudgetError(FlipError):
    """The constant-shift neighborhood cannot deliver the requested budget."""


class CoefficientOverflowError(FlipError):
    pass


class AliasingError(FlipError):
    pass


class LengthMismatchError(FlipError):
    pass


class SeriesTooShortError(FlipError):
    pass


class ZeroVarianceError(FlipError):
    pass


class ReplicateError(FlipError):
    """A Monte Carlo replicate failed; ``index`` is its 0-based position."""

    def __init__(self, message, index):
        super().__init__(f"replicate {index}: {message}")
        self.index = index
