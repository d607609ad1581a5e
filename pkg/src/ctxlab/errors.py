"""Exception hierarchy.

Every error raised on bad input derives from :class:`ValidationError` so the
CLI can map it to exit status 2; :class:`ProblemTooLarge` maps to 3.
"""


class CtxlabError(Exception):
    """Base class for all ctxlab errors."""


class ValidationError(CtxlabError, ValueError):
    """Input does not describe a valid object."""


class ParseError(ValidationError):
    """A file or raw description is malformed."""


# scenario errors
class UncoveredMeasurement(ValidationError):
    pass


class NestedContext(ValidationError):
    pass


class EmptyOutcomeSet(ValidationError):
    pass


class DuplicateContext(ValidationError):
    pass


class UnknownMeasurement(ValidationError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# distribution / coupling errors
class EmptyKeepSet(ValidationError):
    pass


class UnknownCoordinate(ValidationError):
    pass


class MismatchedOutcomeSets(ValidationError):
    pass


class InvalidDistribution(ValidationError):
    pass


# behaviour errors
class MissingContextTable(ValidationError):
    pass


class UnknownContext(ValidationError):
    pass


class NegativeProbability(ValidationError):
    pass


class SumNotOne(ValidationError):
    def __init__(self, context, actual):
        self.context = tuple(context)
        self.actual = actual
        super().__init__(
            f"table for context {{{','.join(self.context)}}} sums to {actual}, not 1"
        )


class NotASubset(ValidationError):
    pass


class EmptySubset(ValidationError):
    pass


class MeasurementNotInContext(ValidationError):
    pass


class MarginalMismatch(ValidationError):
    pass


class CouplingsEqual(ValidationError):
    pass


class CoordinateMismatch(ValidationError):
    pass


# solver errors
class DimensionMismatch(ValidationError):
    pass


class ProblemTooLarge(CtxlabError):
    def __init__(self, size, cap):
        self.size = size
        self.cap = cap
        super().__init__(f"problem needs {size} variables, above the cap of {cap}")


class InfeasibleRegion(CtxlabError):
    pass


class UnboundedObjective(CtxlabError):
    pass


class SolverError(CtxlabError):
    """The solver produced a result that failed its own verification."""


# contextuality errors
class ImageMismatch(ValidationError):
    pass


class NotMaximalCoupling(ValidationError):
    def __init__(self, measurement, message):
        self.measurement = measurement
        super().__init__(message)


class DegenerateBehaviour(ValidationError):
    pass


class InternalInconsistency(CtxlabError):
    """Verdicts violate a proven inclusion law; always an implementation bug."""
