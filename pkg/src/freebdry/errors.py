"""Exception types shared across the package."""


class DomainValidationError(ValueError):
    """A polygonal domain (or grid request) violates a structural invariant."""


class PreconditionError(ValueError):
    """An operation was called on inputs outside its admissible class."""


class DegenerateCutError(ValueError):
    """A reflection step cannot be carried out for this cut geometry."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its budget before reaching tolerance."""
