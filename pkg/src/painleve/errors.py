"""Exception hierarchy shared by every layer of the toolkit.

``UsageError`` subclasses signal bad input (the CLI maps them to exit code 2);
everything else under ``PainleveError`` is a computational failure (exit 3).
"""


class PainleveError(Exception):
    """Base class for all toolkit errors."""


class UsageError(PainleveError):
    """Malformed input supplied by the caller."""


# exact algebra

class DivisionByZero(PainleveError, ZeroDivisionError):
    pass


class UnknownDerivative(PainleveError):
    def __init__(self, var):
        super().__init__(f"no derivative image assigned to {var}")
        self.var = var


class SubstitutionPole(PainleveError):
    pass


class NotASquare(PainleveError):
    pass


# expression language

class ParseError(UsageError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UndeclaredIdentifier(UsageError):
    def __init__(self, name):
        super().__init__(f"undeclared identifier {name!r}")
        self.name = name


class TickError(UsageError):
    pass


# equations and transformations

class ArityMismatch(UsageError):
    pass


class ConstraintViolation(UsageError):
    pass


class NotLiftable(PainleveError):
    pass


class NotReducible(PainleveError):
    pass


class IdenticallySingular(PainleveError):
    def __init__(self, message, step=None):
        if step is not None:
            message = f"{message} (word position {step})"
        super().__init__(message)
        self.step = step


# classification

class UnsupportedParameterField(PainleveError):
    pass


class DeltaZero(PainleveError):
    pass


# numerics

class PathThroughFixedSingularity(PainleveError):
    pass


class StepSizeUnderflow(PainleveError):
    def __init__(self, last_t):
        super().__init__(f"step size underflow; last good t = {last_t!r}")
        self.last_t = last_t


class PointwiseSingular(PainleveError):
    def __init__(self, index, message="transformation denominator vanishes"):
        super().__init__(f"{message} at sample {index}")
        self.index = index


class InsufficientSamples(PainleveError):
    pass


class RhsSingularAtSeed(PainleveError):
    pass
