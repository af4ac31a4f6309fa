"""Exception hierarchy shared by all railcorridor modules."""


class RailCorridorError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(RailCorridorError, ValueError):
    """An input violates a documented precondition."""


class EmptyGridError(InvalidParameterError):
    """The sampling step is larger than the segment being sampled."""


class InsufficientDataError(InvalidParameterError):
    """A time series does not cover the requested horizon."""


class InfeasibleError(RailCorridorError):
    """No solution exists for the requested planning problem."""


class InfeasiblePlacementError(InfeasibleError):
    """Repeater positions would fall outside the open segment (0, isd)."""


class NoFeasibleISDError(InfeasibleError):
    """Even the smallest inter-site distance on the search grid fails."""


class NoFeasibleSystemError(InfeasibleError):
    """No panel/battery combination meets the zero-downtime requirement."""


class PVGISError(RailCorridorError):
    """Base class for PVGIS ingestion failures."""


class NetworkError(PVGISError):
    """The PVGIS service could not be reached within the retry budget."""


class HTTPStatusError(PVGISError):
    """The PVGIS service answered with a non-success HTTP status."""

    def __init__(self, status: int, message: str = ""):
        self.status = status
        super().__init__(f"HTTP {status}: {message}" if message else f"HTTP {status}")


class ParseError(PVGISError, ValueError):
    """A payload is not a well-formed hourly series."""
