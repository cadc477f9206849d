"""Exception hierarchy.

Input problems derive from :class:`InvalidInput` (a ``ValueError``) so the
CLI can map them to exit code 2. Negative *decisions* (not total, not
Archimedean, infeasible) are :class:`DecisionFailure` and carry the
certificate that justifies them.
"""


class PlausibilityError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(PlausibilityError, ValueError):
    pass


class CoverViolation(InvalidInput):
    def __init__(self, outcome):
        super().__init__(f"outcome {outcome!r} belongs to no test")
        self.outcome = outcome


class EmptyTest(InvalidInput):
    pass


class DuplicateOutcomeId(InvalidInput):
    pass


class InvalidOutcomeId(InvalidInput):
    pass


class UnknownOutcomeInTest(InvalidInput):
    pass


class UnknownOutcome(InvalidInput):
    pass


class EmptyLabelList(InvalidInput):
    pass


class NotPrime(InvalidInput):
    pass


class DimensionTooSmall(InvalidInput):
    pass


class StateNotInSpace(InvalidInput):
    pass


class NotAnEvent(InvalidInput):
    pass


class InvalidMeasure(InvalidInput):
    pass


class EmptyMeasureList(InvalidInput):
    pass


class IndexMismatch(InvalidInput):
    pass


class MalformedProblem(InvalidInput):
    pass


class TooManyGenerators(InvalidInput):
    pass


class NotACertificate(InvalidInput):
    pass


class LimitExceeded(PlausibilityError):
    """A configured size cap was hit; nothing is ever silently truncated."""


class SpaceTooLarge(LimitExceeded):
    pass


class EventExplosion(LimitExceeded):
    def __init__(self, count, cap, exact=True):
        bound = "" if exact else "at least "
        super().__init__(f"event count {bound}{count} exceeds cap {cap}")
        self.count = count
        self.cap = cap
        self.exact = exact


class ScopeTooLarge(LimitExceeded):
    pass


class InconsistentOrder(PlausibilityError):
    """The closure puts some event strictly below itself.

    ``cycle`` is a shortest cycle of base edges ``(lhs, rhs, relation)``
    that uses at least one strict edge.
    """

    def __init__(self, message, cycle=()):
        super().__init__(message)
        self.cycle = tuple(cycle)


class Axiom3Violation(InconsistentOrder):
    pass


class DecisionFailure(PlausibilityError):
    pass


class NotTotal(DecisionFailure):
    def __init__(self, pair):
        a, b = pair
        super().__init__(f"events {list(a)} and {list(b)} are incomparable")
        self.pair = pair


class NotArchimedean(DecisionFailure):
    def __init__(self, message, margin=None, violation=None):
        super().__init__(message)
        self.margin = margin
        self.violation = violation


class Infeasible(DecisionFailure):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class SeparationFailed(DecisionFailure):
    def __init__(self, pair):
        a, b = pair
        super().__init__(f"no separating functional for {list(a)} < {list(b)}")
        self.pair = pair
