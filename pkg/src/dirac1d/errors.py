"""Exception types raised across the package."""


class DiracError(Exception):
    """Base class for all package errors."""


class DomainError(DiracError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class PreconditionError(DiracError, ValueError):
    """A documented precondition of an operation is violated."""


class DegenerateError(DiracError):
    """An operator that must be invertible has a nontrivial kernel."""


class UnsupportedStructureError(DiracError):
    """The system lacks the structure a closed-form evaluation relies on."""


class RootRefinementError(DiracError):
    """Root refinement failed to converge; carries the bracketing data."""

    def __init__(self, message, bracket=None, values=None):
        super().__init__(message)
        self.bracket = bracket
        self.values = values


class NumericalConsistencyError(DiracError):
    """A quantity that must be an integer is too far from one."""


class ModelRegionError(DomainError):
    """The level-set parameter leaves the region where the saddle model holds."""
