"""Exception types shared across the toolkit."""


class SymdynError(Exception):
    """Base class for all toolkit errors."""


class MapSpecError(SymdynError):
    """Malformed map description (bad JSON layout or expression grammar)."""


class ConvergenceError(SymdynError):
    """An iterative solve failed to reach its tolerance within budget."""


class EscapeError(SymdynError):
    """A point left the closed unit disk; the family data is invalid."""


class ResolutionError(SymdynError):
    """Angular sampling too coarse to track winding unambiguously."""


class OrbitCollisionError(SymdynError):
    """Two suspension loops passed within the collision threshold."""


class ActionUndefinedError(SymdynError):
    """No action model for this family combination."""


class DegenerateOrbitError(SymdynError):
    """Operation requires a non-degenerate orbit."""


class EstimatorMismatchError(SymdynError):
    """Two independent estimates of the same quantity disagree: likely a bug."""


class SketchError(SymdynError):
    """Structurally invalid foliation sketch or missing lookup data."""
