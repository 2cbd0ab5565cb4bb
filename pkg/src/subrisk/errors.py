"""Exception hierarchy.

The CLI maps each family to its own exit status, so new errors should
subclass one of the three family bases.
"""

from __future__ import annotations


class SubriskError(Exception):
    """Base class for all package errors."""


class ParseError(SubriskError):
    """A table file could not be read or parsed."""


class ValidationError(SubriskError, ValueError):
    """Input violates a model invariant."""


class SimulationError(SubriskError, RuntimeError):
    """Monte Carlo or enumeration could not produce an estimate."""


class NonPositiveCellError(ValidationError):
    pass


class SumNotOneError(ValidationError):
    pass


class OverlappingGroupsError(ValidationError):
    pass


class ShapeMismatchError(ValidationError):
    pass


class ZeroGroupMassError(ValidationError):
    """Some group of the estimate carries no mass; its conditional is undefined."""


class EmptySampleError(ValidationError):
    pass


class ZeroGroupCountError(ValidationError):
    """A group has no observations, so the submodel MLE is undefined."""


class DegenerateSubmodelError(ValidationError):
    """Every restriction is solid; the submodel risk is identically zero."""


class TooLargeError(SimulationError):
    pass


class AllDiscardedError(SimulationError):
    pass


class NonMonotoneEstimateError(SimulationError):
    pass
