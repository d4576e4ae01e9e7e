"""Exception hierarchy shared by all onionlearn modules."""

from __future__ import annotations


class OnionLearnError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(OnionLearnError, ValueError):
    pass


class GenerationError(OnionLearnError, RuntimeError):
    pass


class IncomparableDescriptorsError(OnionLearnError, ValueError):
    pass


class ZeroVarianceError(OnionLearnError, ValueError):
    pass


class UnusableTemplateError(OnionLearnError, ValueError):
    pass


class EmptyLibraryError(OnionLearnError, LookupError):
    pass


class CannotClassifyError(EmptyLibraryError):
    pass


class EvalRequiresLabelsError(OnionLearnError, ValueError):
    pass


class NotFoundError(OnionLearnError, KeyError):
    pass


class DatasetFormatError(OnionLearnError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StateFormatError(OnionLearnError, ValueError):
    pass


class ObservationError(OnionLearnError):
    """A geometry or descriptor failure tagged with the offending observation."""

    def __init__(self, observation_id: int, cause: Exception):
        self.observation_id = observation_id
        self.cause = cause
        super().__init__(f"observation {observation_id}: {cause}")
