"""Exact solving and simulation of the card game Peer Pressure."""

from .errors import PeerPressureError
from .game import Player, Position, Strategy, canonicalize, dominates, is_terminal, play_out, successor
from .lemma import (
    IntervalPlan,
    LemmaStrategy,
    LemmaVerdict,
    classify_lemma,
    improvement_steps,
    interval_certificate,
    lemma_strategy,
    phi_times_greater,
    phi_times_less,
)
from .solver import Outcome, SolverTable, best_response, build_table

__all__ = [
    "IntervalPlan",
    "LemmaStrategy",
    "LemmaVerdict",
    "Outcome",
    "PeerPressureError",
    "Player",
    "Position",
    "SolverTable",
    "Strategy",
    "best_response",
    "build_table",
    "canonicalize",
    "classify_lemma",
    "dominates",
    "improvement_steps",
    "interval_certificate",
    "is_terminal",
    "lemma_strategy",
    "phi_times_greater",
    "phi_times_less",
    "play_out",
    "successor",
]
