"""Exception hierarchy shared by all leadframe modules.

ParseError and its subclasses cover malformed input files (CLI exit code 2);
every other LeadframeError is a domain or validation failure (exit code 1).
"""


class LeadframeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LeadframeError):
    """Input file could not be parsed."""


class MissingColumn(ParseError):
    """A required column is absent from the CSV header."""


class BadValue(ParseError):
    """A cell holds a value outside its column's domain."""


class EmptyInput(ParseError):
    """The input contains a header but no data rows."""


class ValidationError(LeadframeError):
    """Structurally parseable data violates a panel invariant."""


class DuplicateObservation(ValidationError):
    """The same (entity, period) pair appears more than once."""


class UnknownColumn(LeadframeError):
    """An aggregation references a column the records do not carry."""


class DegenerateLabels(LeadframeError):
    """Training data contains only one class."""


class DimensionMismatch(LeadframeError):
    """Feature vector or dataset shape does not match the model."""


class TooFewEntities(LeadframeError):
    """Not enough entities to perform an entity-level split."""


class InvalidConfig(LeadframeError):
    """A configuration value is missing, malformed, or out of range."""
