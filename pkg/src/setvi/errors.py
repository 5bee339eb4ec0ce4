"""Exception hierarchy for problem ingestion and the numerical checks."""


class SetVIError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SetVIError):
    """Vectors or matrices with inconsistent dimensions were combined."""


class ZeroGenerator(SetVIError):
    """A dual generator is the zero vector, which encodes no facet."""


class InteriorWitnessInvalid(SetVIError):
    """The declared interior point is not strictly inside the cone."""


class EmptySet(SetVIError):
    """An operation that needs a nonempty point cloud received an empty one."""


class SchemaError(SetVIError):
    """A problem document does not conform to the expected JSON layout."""


class UnknownGenerator(SetVIError):
    """A generator name is not in the built-in catalog."""


class BadParameters(SetVIError):
    """Generator parameters are malformed or inconsistent."""


class EmptyDomain(SetVIError):
    """A map was loaded with no domain samples at all."""


class OutsideSampleDomain(SetVIError):
    """A tabulated map was evaluated at a point that is not a stored sample."""


class BasePointOutsideDomain(SetVIError):
    """A check was anchored at a base point where the map value is empty."""


class NonSingletonValue(SetVIError):
    """A vector-valued operation received a map with non-singleton values."""


class StepOutsideDomain(SetVIError):
    """A directional derivative has no probe point inside the path interval."""


class NoWitnessFound(SetVIError):
    """The mean-value witness scan exhausted the grid.

    Either the scan grid is too coarse or the path is not lower
    semicontinuous; the message reports both possibilities.
    """


class GridTooCoarse(SetVIError):
    """A path grid is too small for the requested classification."""


class InternalCheckError(SetVIError):
    """Two internally redundant tests disagreed; carries diagnostics."""
