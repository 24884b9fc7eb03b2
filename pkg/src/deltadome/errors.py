"""Exception hierarchy shared by all deltadome modules."""

from __future__ import annotations


class DomeError(Exception):
    """Base class for every error raised by deltadome."""


# geometry primitives
class DegenerateEdge(DomeError):
    pass


class DegenerateFace(DomeError):
    pass


class NonPlanarFace(DomeError):
    pass


class DegenerateWedge(DomeError):
    pass


# polygons
class NotClosed(DomeError):
    """The integer edge lengths do not close an equiangular polygon."""


class NonConvex(DomeError):
    pass


# constructors
class NotDomeable(DomeError):
    """Raised by the decider; ``reason`` names the failed condition."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ApexDegenerate(DomeError):
    pass


class NotPolyiamondPolygon(DomeError):
    pass


class ConditionsViolated(DomeError):
    pass


class BandDoesNotClose(DomeError):
    pass


# gauss map
class OutOfRange(DomeError):
    pass


class Unrealizable(DomeError):
    pass


# search
class BudgetExceeded(DomeError):
    def __init__(self, emitted: int):
        super().__init__(f"template budget exhausted after {emitted} templates")
        self.emitted = emitted


class DidNotConverge(DomeError):
    def __init__(self, best_residual: float):
        super().__init__(f"no embedding found (best residual {best_residual:.3e})")
        self.best_residual = best_residual


# io
class MeshFormatError(DomeError):
    pass
