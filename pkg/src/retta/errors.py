"""Exception taxonomy shared by every module.

Each exception carries an ``api_code`` so the gateway can map pipeline
failures onto its error vocabulary without inspecting types route by route.
"""


class RettaError(Exception):
    """Base class for all domain errors."""

    api_code = "internal"


class ValidationError(RettaError):
    """A value violates a documented invariant."""

    api_code = "validation"


class ParseError(ValidationError):
    """A record in an input file could not be parsed.

    ``line`` is 1-based and always set when the source is line-delimited.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class IntegrityError(ValidationError):
    """Stored or cross-referenced data is inconsistent (duplicate ids,
    corrupt files, dangling references)."""


class ParameterError(ValidationError):
    """An algorithm parameter is out of its documented range."""


class EmptyInputError(ValidationError):
    """An operation that needs at least one element received none."""


class TrainingError(ValidationError):
    """A classifier could not be trained from the labeled data given."""


class StateError(RettaError):
    """An operation was attempted in a project state that forbids it."""

    api_code = "state"


class EligibilityError(RettaError):
    """A service was requested that is not offered for the region."""

    api_code = "eligibility"


class SchemaError(RettaError):
    """A context is missing a field its data source requires."""

    api_code = "schema"

    def __init__(self, message, field=None, source=None):
        self.field = field
        self.source = source
        super().__init__(message)


class NotFoundError(RettaError):
    """A referenced entity does not exist."""

    api_code = "not_found"
