"""Exception types raised by the package."""


class PasdfsError(Exception):
    """Base class for all errors raised here."""


class CapacityError(PasdfsError, ValueError):
    """An argument exceeds a precomputed table or a hard capacity bound."""


class DomainError(PasdfsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class TruncationError(PasdfsError, RuntimeError):
    """The truncated Fock basis could not hold the state to the requested accuracy."""


class AnnihilationError(PasdfsError, RuntimeError):
    """The engineering operators map the state to the zero vector."""
