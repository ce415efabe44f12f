"""Exception types shared across the package."""


class ResistNetError(Exception):
    """Base class for all errors raised by this package."""


class GraphConstructionError(ResistNetError, ValueError):
    """Invalid graph data: bad indices, self-loops, duplicates, bad weights."""


class GraphFormatError(ResistNetError, ValueError):
    """Malformed graph file or dictionary (missing/ill-typed fields)."""


class InputError(ResistNetError, ValueError):
    """Invalid numeric input to a kernel (non-finite or non-symmetric data)."""


class DisconnectedGraphError(ResistNetError, ValueError):
    """Operation requires endpoints (or the whole graph) in one component."""


class SingularMatrixError(ResistNetError, ValueError):
    """A matrix that must be inverted is numerically singular."""


class NotApplicableError(ResistNetError, ValueError):
    """Structural precondition of a certificate does not hold."""


class NominalInstabilityError(ResistNetError, ValueError):
    """Robustness analysis requested on a nominally unstable network."""


class StepSizeError(ResistNetError, ValueError):
    """Integrator step exceeds the stability bound for the dynamics."""


class GenerationError(ResistNetError, RuntimeError):
    """Random graph generation failed within the retry budget."""
