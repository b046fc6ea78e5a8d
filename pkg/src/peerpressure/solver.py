"""Exact winning-strategy tablebase.

``WA(mask)`` holds when Alice can announce a pure positional strategy that
wins against everything Bob does:

    WA(S) = exists Alice card a, for all Bob cards b: WA(successor(S, a, b))

Level ``m`` (positions with ``m`` live cards) only reads level ``m - 1``, so
the table is filled bottom-up, one level at a time.  Swapping the players
maps the game onto itself, hence ``WB(mask) = WA(~mask)`` and only ``WA`` is
computed.  Levels are kept as one byte per mask in memory and as packed bits
on disk.
"""

from __future__ import annotations

import enum
import logging
import struct
import time
import warnings
from collections.abc import Hashable
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from .errors import CapacityExceeded, InvalidInput, NotWinning, TableFormatError, TerminalPosition
from .game import (
    Battle,
    Player,
    Position,
    PositionalStrategy,
    Strategy,
    Transcript,
    _checked_choice,
    canonical_mask,
    is_terminal,
    successor,
)

logger = logging.getLogger(__name__)

DEFAULT_M_MAX = 22
HARD_CAP = 26

MAGIC = b"PPTB"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHH")


class Outcome(enum.Enum):
    ALICE_WIN = "alice"
    BOB_WIN = "bob"
    DRAW = "draw"

    def mirror(self) -> Outcome:
        return {
            Outcome.ALICE_WIN: Outcome.BOB_WIN,
            Outcome.BOB_WIN: Outcome.ALICE_WIN,
            Outcome.DRAW: Outcome.DRAW,
        }[self]

    @classmethod
    def win_for(cls, player: Player) -> Outcome:
        return cls.ALICE_WIN if player is Player.ALICE else cls.BOB_WIN


@numba.njit(cache=True)
def _next_mask(mask, low, high):
    owner = (mask >> high) & 1
    mask = (mask & ~(1 << low)) | (owner << low)
    return (mask & ((1 << high) - 1)) | ((mask >> (high + 1)) << high)


@numba.njit(parallel=True, cache=True)
def _fill_level(m, prev, out):
    full = (1 << m) - 1
    for mask in numba.prange(1 << m):
        if mask == full:
            out[mask] = 1
            continue
        if mask == 0:
            out[mask] = 0
            continue
        win = 0
        for a in range(m):
            if not (mask >> a) & 1:
                continue
            holds = 1
            for b in range(m):
                if (mask >> b) & 1:
                    continue
                if a < b:
                    nxt = _next_mask(mask, a, b)
                else:
                    nxt = _next_mask(mask, b, a)
                if prev[nxt] == 0:
                    holds = 0
                    break
            if holds:
                win = 1
                break
        out[mask] = win


def _set_workers(workers: int | None) -> None:
    if workers is not None:
        numba.set_num_threads(max(1, min(workers, numba.config.NUMBA_NUM_THREADS)))


def _quiet_threading_layer() -> None:
    # numba probes TBB first and warns about old versions; pick a layer up front.
    if numba.config.THREADING_LAYER == "default":
        numba.config.THREADING_LAYER = "workqueue"


class SolverTable:
    """Immutable ``WA``/``WB`` tables for live counts ``1..m_max``."""

    def __init__(self, levels: list[np.ndarray]) -> None:
        # levels[m] is the WA array of length 2**m; levels[0] is a placeholder.
        self._levels = levels
        for arr in levels:
            arr.setflags(write=False)

    @property
    def m_max(self) -> int:
        return len(self._levels) - 1

    def wa_level(self, m: int) -> np.ndarray:
        self._check(m)
        return self._levels[m]

    def wb_level(self, m: int) -> np.ndarray:
        # complementing a mask of width m reverses the index order
        self._check(m)
        return self._levels[m][::-1]

    def wa(self, mask: int, m: int) -> bool:
        self._check(m)
        return bool(self._levels[m][mask])

    def wb(self, mask: int, m: int) -> bool:
        self._check(m)
        return bool(self._levels[m][mask ^ ((1 << m) - 1)])

    def _check(self, m: int) -> None:
        if m > self.m_max:
            raise CapacityExceeded(f"{m} live cards exceeds table capacity {self.m_max}")
        if m < 1:
            raise InvalidInput("positions need at least one live card")

    def wins(self, pos: Position, player: Player) -> bool:
        mask, m = canonical_mask(pos), pos.live_count
        return self.wa(mask, m) if player is Player.ALICE else self.wb(mask, m)

    def outcome(self, pos: Position) -> Outcome:
        winner = is_terminal(pos)
        if winner is not None:
            return Outcome.win_for(winner)
        mask, m = canonical_mask(pos), pos.live_count
        if self.wa(mask, m):
            return Outcome.ALICE_WIN
        if self.wb(mask, m):
            return Outcome.BOB_WIN
        return Outcome.DRAW

    def outcome_of_mask(self, mask: int, m: int) -> Outcome:
        if self.wa(mask, m):
            return Outcome.ALICE_WIN
        if self.wb(mask, m):
            return Outcome.BOB_WIN
        return Outcome.DRAW

    def winning_moves(self, pos: Position, player: Player) -> set[int]:
        """Cards ``player`` can play that keep a forced win against every reply."""
        if is_terminal(pos) is not None:
            raise TerminalPosition(f"{pos} is already decided")
        if not self.wins(pos, player):
            raise NotWinning(f"{player.value} has no winning strategy in {pos}")
        other = player.opponent
        moves = set()
        for card in pos.hand(player):
            ok = True
            for reply in pos.hand(other):
                a, b = (card, reply) if player is Player.ALICE else (reply, card)
                if not self.wins(successor(pos, a, b), player):
                    ok = False
                    break
            if ok:
                moves.add(card)
        return moves

    def policy(self) -> PositionalStrategy:
        """Lowest winning card where a forced win exists, else lowest card."""

        def rule(pos: Position, player: Player) -> int:
            if self.wins(pos, player):
                return min(self.winning_moves(pos, player))
            return min(pos.hand(player))

        return PositionalStrategy("solver", rule)

    def extract_strategy(self, pos: Position, player: Player) -> PositionalStrategy:
        if is_terminal(pos) is None and not self.wins(pos, player):
            raise NotWinning(f"{player.value} has no winning strategy in {pos}")
        return self.policy()

    # --- persistence ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, self.m_max))
            for m in range(1, self.m_max + 1):
                fh.write(np.packbits(self.wa_level(m), bitorder="little").tobytes())
                fh.write(np.packbits(self.wb_level(m), bitorder="little").tobytes())

    @classmethod
    def load(cls, path: str | Path, m_max: int | None = None) -> SolverTable:
        """Read a cached table, optionally keeping only levels up to ``m_max``."""
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size:
            raise TableFormatError(f"{path}: truncated header")
        magic, version, stored = _HEADER.unpack_from(data)
        if magic != MAGIC or version != FORMAT_VERSION:
            raise TableFormatError(f"{path}: not a version-{FORMAT_VERSION} PPTB table")
        expected = _HEADER.size + sum(2 * _packed_len(m) for m in range(1, stored + 1))
        if len(data) != expected:
            raise TableFormatError(f"{path}: expected {expected} bytes, found {len(data)}")
        keep = stored if m_max is None else m_max
        if keep > stored:
            raise CapacityExceeded(f"{path} holds {stored} levels, {keep} requested")
        levels = [np.zeros(1, dtype=np.uint8)]
        offset = _HEADER.size
        for m in range(1, keep + 1):
            size = _packed_len(m)
            raw = np.frombuffer(data, dtype=np.uint8, count=size, offset=offset)
            wa = np.unpackbits(raw, bitorder="little")[: 1 << m].copy()
            raw_b = np.frombuffer(data, dtype=np.uint8, count=size, offset=offset + size)
            wb = np.unpackbits(raw_b, bitorder="little")[: 1 << m]
            if not np.array_equal(wb, wa[::-1]):
                raise TableFormatError(f"{path}: level {m} WB is not the mirror of WA")
            levels.append(wa)
            offset += 2 * size
        return cls(levels)


def _packed_len(m: int) -> int:
    return ((1 << m) + 7) // 8


def build_table(m_max: int = DEFAULT_M_MAX, workers: int | None = None) -> SolverTable:
    """Fill ``WA`` for every ownership mask with up to ``m_max`` live cards."""
    if not 1 <= m_max <= HARD_CAP:
        raise CapacityExceeded(f"m_max must be within 1..{HARD_CAP}, got {m_max}")
    _quiet_threading_layer()
    _set_workers(workers)
    levels = [np.zeros(1, dtype=np.uint8)]
    started = time.perf_counter()
    for m in range(1, m_max + 1):
        out = np.empty(1 << m, dtype=np.uint8)
        _fill_level(m, levels[m - 1], out)
        if np.any(out & out[::-1]):
            raise AssertionError(f"level {m}: both players marked as winning")
        levels.append(out)
    logger.debug("built table to m=%d in %.2fs", m_max, time.perf_counter() - started)
    return SolverTable(levels)


def load_or_build(
    path: str | Path | None, m_max: int = DEFAULT_M_MAX, workers: int | None = None
) -> SolverTable:
    """Use the cache at ``path`` if it covers ``m_max``; otherwise rebuild and store."""
    if path is not None:
        path = Path(path)
        if path.exists():
            try:
                return SolverTable.load(path, m_max)
            except CapacityExceeded as exc:
                logger.info("extending table cache: %s", exc)
            except TableFormatError as exc:
                logger.warning("ignoring table cache: %s", exc)
    table = build_table(m_max, workers)
    if path is not None:
        table.save(path)
    return table


# --- best response to a revealed strategy --------------------------------------


@dataclass(frozen=True)
class BestResponseReport:
    beaten: bool
    witness: Transcript | None = None


def best_response(pos: Position, revealed: Strategy, defender: Player) -> BestResponseReport:
    """Search for a defender line that beats ``revealed`` (played by the other side).

    The revealed player's card is pinned by its strategy at every node; the
    defender tries each of its cards.  Nodes are memoized on the position
    together with the strategy's memory.
    """
    attacker = defender.opponent
    replies: dict[tuple[Position, Hashable], int | None] = {}

    def refutes(p: Position, memory: Hashable) -> bool:
        winner = is_terminal(p)
        if winner is not None:
            return winner is defender
        key = (p, memory)
        if key in replies:
            return replies[key] is not None
        card = _checked_choice(revealed, p, attacker, memory)
        found = None
        for reply in sorted(p.hand(defender)):
            a, b = (card, reply) if attacker is Player.ALICE else (reply, card)
            nxt = successor(p, a, b)
            if refutes(nxt, revealed.observe(memory, attacker, card, reply, nxt)):
                found = reply
                break
        replies[key] = found
        return found is not None

    if is_terminal(pos) is not None:
        return BestResponseReport(is_terminal(pos) is defender)
    memory = revealed.start(pos, attacker)
    if not refutes(pos, memory):
        return BestResponseReport(False)

    battles = []
    p = pos
    while is_terminal(p) is None:
        card = revealed.choose(p, attacker, memory)
        reply = replies[(p, memory)]
        a, b = (card, reply) if attacker is Player.ALICE else (reply, card)
        nxt = successor(p, a, b)
        battles.append(Battle(a, b, Player.ALICE if a > b else Player.BOB))
        memory = revealed.observe(memory, attacker, card, reply, nxt)
        p = nxt
    return BestResponseReport(True, Transcript(pos, tuple(battles), p, defender))
