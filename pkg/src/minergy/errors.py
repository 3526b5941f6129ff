"""Exception hierarchy shared by every module."""


class MinergyError(Exception):
    """Base class for all library errors."""


class InvalidInstance(MinergyError, ValueError):
    pass


class NegativeLambda(MinergyError, ValueError):
    pass


class DegenerateDistance(MinergyError, ValueError):
    """Zero distance raised to a nonpositive power."""


class DimensionMismatch(MinergyError, ValueError):
    pass


class IndexOutOfRange(MinergyError, IndexError):
    pass


class NoBracket(MinergyError, ArithmeticError):
    pass


class MultipleRoots(MinergyError, ArithmeticError):
    pass


class ParallelCosts(MinergyError, ArithmeticError):
    """Two graphs have identical secondary-term energy, so no finite crossover exists."""


class TooLarge(MinergyError, ValueError):
    pass


class DegenerateGain(MinergyError, ValueError):
    pass


class InfeasibleFlow(MinergyError, ValueError):
    pass


class ScheduleError(MinergyError, ValueError):
    pass


class InstanceParseError(MinergyError, ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message
