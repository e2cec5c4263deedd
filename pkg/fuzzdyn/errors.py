"""
Exception hierarchy for fuzzdyn.

Every error raised on purpose by the package derives from FuzzDynError, and
also from the builtin it specialises so callers can keep catching ValueError
or TypeError.
"""


class FuzzDynError(Exception):
    """Base class for all fuzzdyn errors."""


class DomainError(FuzzDynError, ValueError):
    """A point, set, level or argument lies outside the domain of an operation.

    Raised for points not in their universe, objects living in different
    universes, and arguments of the wrong kind for a system level.
    """


class NormalityError(DomainError):
    """A fuzzy set whose highest membership level is not exactly 1."""


class ConfigurationError(FuzzDynError, ValueError):
    """Bad configuration: unknown keys, mismatched density sets, invalid weights."""


class PreconditionError(FuzzDynError, ValueError):
    """An operation was called outside its stated precondition."""


class GeneratorContractError(FuzzDynError, RuntimeError):
    """A candidate generator produced a candidate outside the requested ball."""


class InvariantViolation(FuzzDynError, AssertionError):
    """A computed object broke an invariant that the theory guarantees."""


class UnsupportedOperation(FuzzDynError, TypeError):
    """The universe does not support the requested operation (e.g. addition)."""
