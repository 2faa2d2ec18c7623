"""Exception types shared across the package."""


class TexlabError(Exception):
    """Base class for every texlab-specific error."""


class LengthMismatchError(TexlabError, ValueError):
    """Two vectors or row lists that must have equal length do not."""


class DimensionMismatchError(TexlabError, ValueError):
    """An input vector does not match a model's expected dimension."""


class ShapeMismatchError(TexlabError, ValueError):
    """Tensor shapes are incompatible for the requested operation."""


class NegativeEntryError(TexlabError, ValueError):
    """A vector that must be nonnegative has a negative entry."""


class AllZeroError(TexlabError, ValueError):
    """A vector that must have positive mass sums to zero."""


class EmptyInputError(TexlabError, ValueError):
    """A collection that must be nonempty is empty."""


class EmptySetError(TexlabError, ValueError):
    """A label set that must be nonempty is empty."""


class IndexOutOfRangeError(TexlabError, IndexError):
    """A label index lies outside [0, c)."""


class UndefinedTermError(TexlabError, ArithmeticError):
    """Strict mode hit a 0/0 or log-of-zero term instead of applying a convention."""


class ZeroVarianceError(TexlabError, ValueError):
    """Correlation of a constant vector is undefined."""


class ZeroNormError(TexlabError, ValueError):
    """Cosine similarity against an all-zero vector is undefined."""


class DomainError(TexlabError, ValueError):
    """A value lies outside the domain its contract requires."""


class ConfigError(TexlabError, ValueError):
    """A configuration value is invalid."""


class ImageTooSmallError(TexlabError, ValueError):
    """Image dimensions are smaller than a filter kernel."""


class NonFiniteError(TexlabError, ArithmeticError):
    """A NaN or infinity appeared in a computation that must stay finite."""


class NotScalarError(TexlabError, ValueError):
    """Backpropagation was requested from a non-scalar output."""


class CorruptCheckpointError(TexlabError, ValueError):
    """A checkpoint file failed its magic, structure, or CRC check."""


class VersionMismatchError(TexlabError, ValueError):
    """A checkpoint was written by an unsupported format version."""
