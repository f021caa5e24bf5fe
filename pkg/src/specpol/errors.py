"""Exception and warning types shared across the package."""


class SpecpolError(Exception):
    """Base class for all errors raised by specpol."""


class DimensionMismatch(SpecpolError):
    pass


class NotHermitian(SpecpolError):
    pass


class NoConvergence(SpecpolError):
    pass


class BasisNotOrthonormal(SpecpolError):
    pass


class OutsideRange(SpecpolError):
    """Requested target lies outside the numerical range (beyond tolerance)."""


class NoWitness(SpecpolError):
    """Witness construction stalled; carries diagnostic detail in args."""


class EmptyRegion(SpecpolError):
    pass


class LimitMismatch(SpecpolError):
    """Declared coefficient limits disagree with the coefficient functions."""


class GridTooCoarse(SpecpolError):
    pass


class GridInsufficient(SpecpolError):
    pass


class TooFewMatrices(SpecpolError):
    pass


class HypothesisViolated(SpecpolError):
    """Injection target is not inside the essential-range estimate."""


class WindowExhausted(SpecpolError):
    """Window advancement hit its cap without reaching the target."""


class ComplexQ1(SpecpolError):
    """Gauge transform requires a real-valued first-order coefficient."""


class NotStabilized(UserWarning):
    """Tail accumulation has not stabilized below the declared tolerance."""
