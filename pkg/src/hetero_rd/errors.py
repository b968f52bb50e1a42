"""Exception hierarchy shared by all hetero_rd modules."""

from __future__ import annotations


class HeteroRdError(Exception):
    """Base class for all package-specific errors."""


class OutOfDomain(HeteroRdError):
    """A coordinate falls outside the domain [0, L]."""


class InterfaceNotOnFace(HeteroRdError):
    """A requested interface position does not coincide with a mesh face."""


class DuplicateInterface(HeteroRdError):
    """Two interface positions snap to the same mesh face."""


class NotBistable(HeteroRdError):
    """A reaction function violates one of the bistability hypotheses."""


class DimensionMismatch(HeteroRdError):
    """Array sizes are inconsistent with the grid."""


class SingularSystem(HeteroRdError):
    """A tridiagonal system is singular to working precision."""


class NewtonDiverged(HeteroRdError):
    """The Newton iteration failed to converge; dt is likely too large."""


class InvalidInitialData(HeteroRdError):
    """An initial field violates the 0 <= u0 <= M bounds."""


class BoundViolation(HeteroRdError):
    """A computed field escaped the [0, M] bounds beyond the tolerance."""


class GridMismatch(HeteroRdError):
    """Two fields or trajectories are not defined on the same grid/times."""


class TooFewCells(HeteroRdError):
    """Not enough cells on one side of an interface for the gradient stencil."""


class NonPositiveInput(HeteroRdError):
    """A log-space fit received zero or negative data."""


class InsufficientSnapshots(HeteroRdError):
    """A trajectory is too sparse in time for the requested quadrature."""


class NoBracket(HeteroRdError):
    """A root bracket does not enclose a sign change."""


class UnknownDatum(HeteroRdError):
    """An initial-datum name is not recognized."""


class ParseError(HeteroRdError):
    """A config file could not be parsed."""


class ValidationError(HeteroRdError):
    """An experiment spec failed validation.

    Carries the complete list of violations, not just the first one.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
