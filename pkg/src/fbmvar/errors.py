"""Exception types shared across the package."""


class FbmvarError(Exception):
    """Base class for all library errors."""


class DomainError(FbmvarError, ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class RegimeError(FbmvarError, ValueError):
    """The (H, q) pair is not in the regime an operation requires."""


class SeriesDivergenceError(FbmvarError, ValueError):
    """A correlation-power series diverges for the requested parameters."""


class CirculantEmbeddingError(FbmvarError, RuntimeError):
    """The circulant embedding produced eigenvalues below the tolerance."""


class SizeLimitError(FbmvarError, ValueError):
    """A level exceeds the documented ceiling of an algorithm."""


class GridAlignmentError(FbmvarError, ValueError):
    """Two dyadic grids that must coincide do not."""


class ConfigError(FbmvarError, ValueError):
    """An experiment configuration is malformed."""
