class WorkDeficitError(Exception):
    pass


class InvalidStateError(WorkDeficitError, ValueError):
    """Matrix fails the Hermitian / unit-trace / PSD checks."""


class DimensionError(WorkDeficitError, ValueError):
    pass


class LocalityError(WorkDeficitError):
    """A protocol step acts jointly on qubits held by different parties."""


class FamilyMismatchError(WorkDeficitError, ValueError):
    """State is not of the form a closed-form formula requires."""
