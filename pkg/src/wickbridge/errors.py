"""Exception hierarchy.

Every precondition failure derives from :class:`ValidationError`, which is also
a :class:`ValueError` so callers that only know the standard library still
catch it.  Numerical obstructions (caustics, divergent integrals, ambiguous
square-root branches) derive from :class:`NumericalError`.
"""

from __future__ import annotations


class WickBridgeError(Exception):
    """Base class for all library errors."""


class ValidationError(WickBridgeError, ValueError):
    """An argument violates a documented precondition."""


class NumericalError(WickBridgeError, ArithmeticError):
    """A closed form is singular or ill-defined at the requested point."""


# intervals
class ZeroInterval(ValidationError):
    pass


class NonpositiveInterval(ValidationError):
    pass


class DegenerateInterval(ValidationError):
    pass


# kernels
class Caustic(NumericalError):
    pass


class DivergentComposition(NumericalError):
    pass


class BranchAmbiguity(NumericalError):
    pass


class GridTooNarrow(ValidationError):
    pass


# thermodynamics
class ReciprocityViolation(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class UnstableStep(ValidationError):
    pass


class UnorderedGates(ValidationError):
    pass


# dictionary
class ZeroFrequency(ValidationError):
    pass


class ZeroNorm(ValidationError):
    pass


class DensityFloor(ValidationError):
    pass


class InsufficientTimeSamples(ValidationError):
    pass


class UnnormalizedDensity(ValidationError):
    pass
