"""Exception hierarchy shared by every module."""


class AntiConcError(ValueError):
    """Base class for all library errors."""


class ZeroDifference(AntiConcError):
    def __init__(self, index: int):
        super().__init__(f"pair {index} has u == v (zero difference)")
        self.index = index


class InvalidDimension(AntiConcError):
    pass


class BadEntry(AntiConcError):
    def __init__(self, position, value=None):
        super().__init__(f"entry at {position} is {value!r}, expected +1 or -1")
        self.position = position


class DimensionMismatch(AntiConcError):
    pass


class OverflowRisk(AntiConcError):
    pass


class TooLarge(AntiConcError):
    pass


class GridTooCoarse(AntiConcError):
    pass


class NotInSet(AntiConcError):
    pass


class BadConstant(AntiConcError):
    pass


class IndexOutOfRange(AntiConcError):
    pass


class DomainError(AntiConcError):
    pass


class NoSolution(AntiConcError):
    pass


class HypothesisFailed(AntiConcError):
    pass


class DegenerateAngle(AntiConcError):
    pass


class Undecodable(AntiConcError):
    pass


class InfeasibleSpec(AntiConcError):
    pass


class UnknownSuite(AntiConcError):
    pass
