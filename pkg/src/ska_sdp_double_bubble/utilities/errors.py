"""Exceptions raised by the double bubble tools.

Every error the library raises on purpose derives from ``DoubleBubbleError`` so the
CLI can map it onto an exit code. Usage errors get exit code 2, the rest exit code 1.
"""


class DoubleBubbleError(Exception):
    """Base class for all domain errors."""


class UsageError(DoubleBubbleError):
    """Malformed command line input."""


class InvalidParameterError(DoubleBubbleError, ValueError):
    """A numeric parameter is outside its allowed range."""


class InfeasibleSpecError(DoubleBubbleError):
    """The requested volumes cannot be realised by the candidate topology."""


class UnsupportedLatticeError(DoubleBubbleError):
    """The operation is only defined for some lattice kinds."""


class MeshParseError(DoubleBubbleError):
    """A mesh file could not be parsed."""

    def __init__(self, message: str, offset: int | None = None, field: str | None = None):
        self.offset = offset
        self.field = field
        location = []
        if field is not None:
            location.append(f"field '{field}'")
        if offset is not None:
            location.append(f"byte {offset}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class InvalidMeshError(DoubleBubbleError):
    """An operation that needs a valid mesh was given an invalid one."""


class AnchoringError(DoubleBubbleError):
    """A body volume fell outside (0, det) after anchoring."""


class DegenerateConstraintError(DoubleBubbleError):
    """The two volume gradients are (numerically) linearly dependent."""


class ProjectionError(DoubleBubbleError):
    """Volume projection did not converge."""


class PreconditionError(DoubleBubbleError):
    """An operation was called outside its precondition."""


class ClassificationError(DoubleBubbleError):
    """A point could not be assigned to a region."""


class OracleUnreliableError(DoubleBubbleError):
    """Too many Monte Carlo samples failed classification."""


class ResolutionError(DoubleBubbleError):
    """A sampled search found no sign change at the current resolution."""
