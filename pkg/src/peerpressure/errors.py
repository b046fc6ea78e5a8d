"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class PeerPressureError(Exception):
    """Base class for all domain errors."""


class InvalidInput(PeerPressureError, ValueError):
    """Malformed user input (bad position text, bad model parameters, ...)."""


class OverlapError(InvalidInput):
    """The two hands share a card."""


class CardNotHeld(PeerPressureError):
    """A played card is not in the owner's hand."""


class TerminalPosition(PeerPressureError):
    """An operation needing a live battle was given a finished position."""


class BothEmpty(PeerPressureError):
    """Both hands are empty; never reachable through legal play."""


class StrategyError(PeerPressureError):
    """A strategy returned a card its player does not hold."""


class RoundLimitExceeded(PeerPressureError):
    pass


class CapacityExceeded(PeerPressureError):
    """Requested live-card count exceeds the table's capacity."""


class NotWinning(PeerPressureError):
    """The requested player has no winning strategy from the position."""


class LemmaNotApplicable(PeerPressureError):
    pass


class LemmaInvariantError(PeerPressureError, AssertionError):
    """A phase-switch invariant of the lemma strategy was violated."""


class LengthMismatch(InvalidInput):
    pass


class InvalidTrials(InvalidInput):
    pass


class InvalidK(InvalidInput):
    pass


class TableFormatError(PeerPressureError):
    """A cached table file is truncated or has a foreign header."""
