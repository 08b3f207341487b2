"""Exception hierarchy shared by every module in the package."""


class GameError(ValueError):
    """Base class; all errors raised here are ``ValueError`` subclasses."""


class InvalidForecast(GameError):
    pass


class OutcomeOutOfRange(GameError):
    pass


class NegativeDiscard(GameError):
    pass


class NonpositiveWidth(GameError):
    pass


class NegativeCapital(GameError):
    pass


class BadCentering(GameError):
    """Raised when a centered-form check gets an interval not straddling 0."""


class LengthMismatch(GameError):
    pass


class InvalidEvent(GameError):
    pass


class NonpositiveC(GameError):
    pass


class ZeroReplicates(GameError):
    pass


class EmptyGrid(GameError):
    pass


class StateExplosion(GameError):
    """The discretized game exceeds the oracle's enumeration caps."""
