"""Exception types shared across the library."""


class DeltaPrimeError(Exception):
    """Base class for all library errors."""


class SchemaError(DeltaPrimeError):
    """A config/result document violates the published JSON schema.

    Carries the JSON pointer of the offending element.
    """

    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


class DomainError(DeltaPrimeError):
    """Base class for mathematical-domain errors (CLI exit status 2)."""


class RefinementUnavailableError(DomainError):
    """Requested refinement level exceeds a generator's level_cap."""


class PropagationOverflowError(DomainError):
    """State propagation overflowed beyond recoverable rescaling."""


class NearSingularError(DomainError):
    """z is at or numerically indistinguishable from an eigenvalue."""


class DomainViolationError(DomainError):
    """A trial function lies outside the quadratic-form domain."""


class MeshRefinementError(DomainError):
    """Discretization mesh is too coarse to separate measure atoms."""


class UnsupportedHypothesisError(DomainError):
    """Input lies outside the hypotheses of the implemented criterion."""


class InsufficientDataError(DomainError):
    """Not enough samples/eigenvalues for the requested fit or check."""
