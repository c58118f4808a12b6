"""Exception hierarchy for the graph generator and its evaluators."""


class OmegaError(ValueError):
    """Base class for every error raised by the library."""


class GraphError(OmegaError):
    """Invalid graph data: vertex index out of range, duplicate labels, disconnected input."""


class RecursionDomainError(OmegaError):
    """(l, v) outside the domain of a recursion."""


class ResourceGuardError(OmegaError):
    """Instance larger than the configured edge cap."""


class SeriesError(OmegaError):
    """Series arithmetic precondition violated (ring mismatch, non-invertible constant term, ...)."""


class TruncationError(SeriesError):
    """Requested order lies above the declared truncation order."""


class ModelError(OmegaError):
    """Malformed model file or model unsupported by the requested operation."""


class OnePIConventionError(OmegaError):
    """A 1PI table violates the vanishing 0-, 1- (and modified 2-) point conventions."""
