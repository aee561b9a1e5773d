"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` (its class name) so the
service layer and the CLI can surface failures without string matching.
"""


class CubeError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# geometry
class EmptyShape(CubeError):
    pass


# similarity
class EmptyPrototype(CubeError):
    pass


# event replay
class CellOccupied(CubeError):
    pass


class CellAbsent(CubeError):
    pass


class NotAdjacent(CubeError):
    pass


class BaseRemoval(CubeError):
    pass


class DisconnectsStructure(CubeError):
    pass


class NonMonotonicTime(CubeError):
    pass


# measures
class NoEvents(CubeError):
    pass


class ZeroDt(CubeError):
    pass


# network simulator
class FaceOccupied(CubeError):
    pass


class HostUnreachable(CubeError):
    pass


class UnknownCube(CubeError):
    pass


class Collision(CubeError):
    pass


class DanglingLink(CubeError):
    pass


# tasks / sessions
class NotGuidedTask(CubeError):
    pass


class NoActiveTask(CubeError):
    pass


class TooManyCubes(CubeError):
    pass


class InvalidLibrary(CubeError):
    pass


class WrongPhase(CubeError):
    pass


class UnknownSession(CubeError):
    pass


# analysis
class LengthMismatch(CubeError):
    pass


class TooFewPoints(CubeError):
    pass


class ZeroVariance(CubeError):
    pass


class EmptyTable(CubeError):
    pass


class MixedTasks(CubeError):
    pass
