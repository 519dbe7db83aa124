"""Exception hierarchy.

Every error raised on purpose by the package derives from `BernmarkError`.
The CLI maps the solver failures collected in `NUMERICAL` to exit code 3
and every other error (bad input, poles in forbidden places) to 2.
"""


class BernmarkError(Exception):
    pass


class ConfigInvalid(BernmarkError, ValueError):
    pass


# geometry
class NonSimple(BernmarkError):
    pass


class DegenerateTangent(BernmarkError):
    pass


class EndpointFrame(BernmarkError):
    pass


# poles and evaluation
class PoleOnBoundary(BernmarkError):
    pass


class PoleOnSegment(PoleOnBoundary):
    pass


class PoleOnArc(PoleOnBoundary):
    pass


class PoleOnCircle(PoleOnBoundary):
    pass


class PoleNearBoundary(PoleOnBoundary):
    pass


class EvalAtPole(BernmarkError, ZeroDivisionError):
    pass


class EndpointRequested(BernmarkError):
    pass


# green's functions
class SolveFailed(BernmarkError):
    pass


class PoleOnWrongSide(BernmarkError):
    pass


class WrongSideEvaluation(BernmarkError):
    pass


class ExtrapolationUnstable(BernmarkError):
    pass


# open-up
class BranchTrackingFailed(BernmarkError):
    pass


class ExtrapolationMismatch(BernmarkError):
    pass


class NotNormalized(BernmarkError):
    pass


# rational functions
class DuplicatePole(BernmarkError, ValueError):
    pass


class ConstantLeak(BernmarkError, ValueError):
    pass


# extremal constructions
class MixedSides(BernmarkError, ValueError):
    pass


class NotNormalizedAtPoint(BernmarkError, ValueError):
    pass


class UnsupportedCurve(BernmarkError):
    pass


class UnsupportedArc(BernmarkError):
    pass


NUMERICAL = (SolveFailed, ExtrapolationUnstable, ExtrapolationMismatch, BranchTrackingFailed,
             EvalAtPole)
