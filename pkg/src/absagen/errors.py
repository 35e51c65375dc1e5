"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class CorpusParseError(ToolkitError):
    """A corpus file is structurally invalid (bad XML/JSON, missing fields)."""


class SchemaViolationError(ToolkitError):
    """A corpus value falls outside the dataset's label schema."""


class UnsupportedTaskError(ToolkitError):
    """The requested task is not defined for the dataset at hand."""


class SerializationError(ToolkitError):
    """Gold data collides with the wire format and cannot be rendered."""


class PredictionInputError(ToolkitError):
    """A prediction file is inconsistent with the gold split (ids, tasks)."""


class ConfigError(ToolkitError):
    """Bad command-line usage or configuration values."""
