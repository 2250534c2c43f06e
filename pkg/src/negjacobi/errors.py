"""Exception hierarchy shared by the exact and numeric layers."""


class JacobiError(Exception):
    """Base class for all errors raised by this package."""


class NonUnit(JacobiError, ArithmeticError):
    pass


class NotDivisible(JacobiError, ArithmeticError):
    pass


class Divergent(JacobiError, ValueError):
    pass


class NonGaussianPhase(JacobiError, ValueError):
    """A shift would produce a phase outside {1, i, -1, -i}."""


class PrecisionUnreachable(JacobiError, ValueError):
    pass


class WindowTooSmall(JacobiError, ValueError):
    pass


class NoConsistentFit(JacobiError, ValueError):
    pass


class OrderMismatch(JacobiError, ArithmeticError):
    pass


class NearPole(JacobiError, ValueError):
    pass


class TailBoundFailure(JacobiError, ArithmeticError):
    pass


class NonConvergent(JacobiError, ArithmeticError):
    pass


class NonStable(JacobiError, ArithmeticError):
    pass
