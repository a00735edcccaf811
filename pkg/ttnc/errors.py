"""Exception types shared by the compiler modules and the CLI.

Command handlers map :class:`MalformedInputError` to exit code 2 and
:class:`CapacityError` to exit code 3; everything else is a bug.
"""


class TtncError(Exception):
    """Base class for all compiler errors."""

    exit_code = 1


class MalformedInputError(TtncError, ValueError):
    """Input file or argument does not follow the declared schema."""

    exit_code = 2


class CapacityError(TtncError):
    """Request exceeds a desk-scale limit (gate arity, simulated qubits)."""

    exit_code = 3


class DimensionMismatchError(TtncError, ValueError):
    """Two legs, registers or states that must agree in size do not."""


class UnknownLegError(TtncError, KeyError):
    """A leg label is not present on the tensor."""


class NotIsometricError(TtncError, ValueError):
    """Matrix expected to have orthonormal columns does not."""


class NotUnitaryError(TtncError, ValueError):
    """Gate matrix fails the unitarity test."""


class UnnormalizedError(TtncError, ValueError):
    """State expected to have unit norm does not."""
