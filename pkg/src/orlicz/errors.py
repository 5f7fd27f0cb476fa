class OrliczError(Exception):
    """Base class for operational failures (as opposed to negative verdicts)."""


class DomainError(OrliczError, ValueError):
    pass


class RangeError(OrliczError, ValueError):
    pass


class GapError(OrliczError):
    """Dyadic level gaps t_{n+1} - t_n do not increase to infinity."""


class SearchFailure(OrliczError):
    pass


class LevelExhaustion(OrliczError):
    pass


class PlacementError(OrliczError):
    pass


class PositionUnrepresentable(OrliczError):
    pass


class PartitionMismatch(OrliczError, ValueError):
    pass


class SpecError(OrliczError, ValueError):
    """Malformed function spec; ``position`` is the offending column."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
