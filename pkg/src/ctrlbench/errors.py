"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class DomainError(WorkbenchError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(WorkbenchError, ValueError):
    """A value violates a structural invariant of its type."""


class SingularDesignError(WorkbenchError, ValueError):
    """A regression design is singular (e.g. all difficulties equal)."""


class CapacityError(WorkbenchError, ValueError):
    """A task demands more attributes than a device senses."""


class ProtocolError(WorkbenchError):
    """A message violates the session ingestion protocol."""


class StateError(WorkbenchError):
    """An operation was applied to a session or trial in the wrong state."""


class ParseError(WorkbenchError, ValueError):
    """A log or spec document could not be parsed.

    ``line`` carries the 1-based offending line number when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class VersionError(ParseError):
    """A document declares an unsupported format version."""
