"""Exception hierarchy shared by every symplab module."""


class SymplabError(Exception):
    """Base class for all library errors."""


class NotSymplecticError(SymplabError, ValueError):
    pass


class SymplecticDriftError(SymplabError, ArithmeticError):
    """A product of symplectic factors drifted beyond the monitored tolerance."""


class DegenerateBasisError(SymplabError, ValueError):
    pass


class ShapeMismatchError(SymplabError, ValueError):
    pass


class ConstraintViolation(SymplabError, ValueError):
    pass


class SeriesNotConverged(SymplabError, ArithmeticError):
    pass


class NotOnLeafError(SymplabError, ValueError):
    """The target point is not on the requested stable/unstable leaf."""


NotOnStableLeaf = NotOnLeafError


class NotConverged(SymplabError, ArithmeticError):
    pass


class PointsTooFar(SymplabError, ValueError):
    pass


class DefectiveEigenproblem(SymplabError, ArithmeticError):
    pass


class NotSimpleReal(SymplabError, ValueError):
    pass


class SeparationFailure(SymplabError, ValueError):
    """A cylinder is too shallow to isolate the perturbation site."""


class EstimatorOverflow(SymplabError, FloatingPointError):
    pass


class StageFailure(SymplabError):
    """Raised by experiment pipelines; ``stage`` names the failing step."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
