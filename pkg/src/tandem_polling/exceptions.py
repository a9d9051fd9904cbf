"""Exception hierarchy for the tandem polling analyzer."""


class PollingError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParams(PollingError, ValueError):
    """A network parameter is out of range.

    The offending field name is kept on ``field`` so front ends can report it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DimensionTooLarge(PollingError):
    """The state space exceeds the configured cap."""


class ReducibleChain(PollingError):
    """The generator has more than one recurrent class."""


class SingularSystem(PollingError):
    """The direct solve failed and no fallback was allowed."""


class ZeroThroughput(PollingError, ZeroDivisionError):
    """A waiting time was requested for a stream with zero throughput."""


class InvalidConfig(PollingError, ValueError):
    """A simulation or experiment configuration is malformed."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
