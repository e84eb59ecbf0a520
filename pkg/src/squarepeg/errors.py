"""Exception types raised across the package."""


class SquarepegError(Exception):
    """Base class for all package errors."""


class DegenerateConfigurationError(SquarepegError):
    """Two points of a configuration coincide (distance below the threshold)."""


class SizeError(SquarepegError):
    """A configuration has the wrong number of points for the operation."""


class ConstructibilityError(SquarepegError):
    """A simplex distance ratio is degenerate or cannot be realized."""


class RankError(SquarepegError):
    """Direction vectors are linearly dependent."""


class ConstraintError(SquarepegError):
    """Input does not satisfy the square-like quadrilateral constraints."""


class UndefinedSignError(SquarepegError):
    """Intersection sign requested at a non-transverse solution."""


class NoConvergenceError(SquarepegError):
    """Newton iteration failed after all restarts."""


class ExtractionError(SquarepegError):
    """No refinement level produced a usable inscribed quadrilateral."""


class SpecError(SquarepegError, ValueError):
    """A curve or surface specification file could not be parsed."""


class CurveError(SquarepegError, ValueError):
    """A curve violates its construction invariants."""
