"""Exception types shared across the package."""


class PlapError(ValueError):
    """Base class for input errors raised by plapspec."""


class DimensionError(PlapError):
    """Vector length does not match the graph."""


class DegenerateInputError(PlapError):
    """Input for which the requested quantity is undefined (constant or zero vectors, isolated vertices)."""


class ParameterError(PlapError):
    """Parameter outside its admissible range."""


class SizeError(PlapError):
    """Problem too large for an exhaustive routine."""


class PreconditionError(PlapError):
    """Input does not satisfy a documented precondition."""
