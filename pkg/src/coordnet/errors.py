"""Exception hierarchy shared across the package."""


class CoordnetError(Exception):
    """Base class for all package errors."""


class SchemaError(CoordnetError):
    """Input stream does not look like the documented record format."""


class DomainExtractionError(CoordnetError):
    """URL could not be reduced to a registered base domain."""


class EmptyMatrixError(CoordnetError):
    """All users were filtered out of a user-entity matrix."""


class ProviderError(CoordnetError):
    """An embedding/sentiment/topic provider violated its contract."""


class ConsistencyError(CoordnetError):
    """Graph and corpus disagree (e.g. a node with no tweets)."""


class ConfigError(CoordnetError):
    """Invalid configuration value or combination."""


class EvaluationError(CoordnetError):
    """Clustering-quality evaluation could not produce a report."""
