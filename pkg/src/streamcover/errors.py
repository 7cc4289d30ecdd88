"""Exception hierarchy shared by every module."""


class StreamCoverError(Exception):
    pass


class InvalidArgument(StreamCoverError, ValueError):
    pass


class UnsupportedDimension(InvalidArgument):
    pass


class InvalidKey(InvalidArgument):
    pass


class InvalidDelta(InvalidArgument):
    pass


class ContractViolation(StreamCoverError):
    """A caller broke a precondition (unsorted input, point outside its window, ...)."""


class NotReady(StreamCoverError):
    """Finalization requested before all required passes ran."""


class OracleLimitExceeded(StreamCoverError):
    pass


class IncompatibleSketch(StreamCoverError, ValueError):
    pass


class ConfigError(StreamCoverError, ValueError):
    pass


class UnsupportedSource(StreamCoverError):
    pass


class InputError(StreamCoverError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
