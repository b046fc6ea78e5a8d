"""Golden-ratio hand-size tests, the two forced-win patterns and their strategies.

Every comparison against the golden ratio phi is an exact integer test.  Since
``phi**2 = phi + 1``, for nonnegative integers ``a > phi*b`` exactly when
``a*a > a*b + b*b``; equality needs ``a = b = 0``.
"""

from __future__ import annotations

import enum
import json
from collections.abc import Hashable, Sequence
from dataclasses import asdict, dataclass
from math import isqrt
from typing import NamedTuple

from .errors import InvalidInput, LemmaInvariantError, LemmaNotApplicable, LengthMismatch
from .game import Player, Position, Strategy, canonicalize, is_terminal


def phi_times_greater(a: int, b: int) -> bool:
    """``a > phi * b``."""
    return a * a > a * b + b * b


def phi_times_less(a: int, b: int) -> bool:
    """``a < phi * b``."""
    return a * a < a * b + b * b


def min_cover(a: int) -> int:
    """Least ``x`` with ``a < phi * x`` (0 when ``a`` is 0)."""
    if a == 0:
        return 0
    # floor(a / phi) = floor((a*sqrt(5) - a) / 2)
    x = (isqrt(5 * a * a) - a) // 2 + 1
    while x > 0 and phi_times_less(a, x - 1):
        x -= 1
    while not phi_times_less(a, x):
        x += 1
    return x


class LemmaVerdict(enum.Enum):
    MANY_CARDS = "many-cards"
    HIGH_CARDS = "high-cards"
    NONE = "none"


def verdict_for(pos: Position, player: Player) -> LemmaVerdict:
    mine, theirs = pos.hand(player), pos.hand(player.opponent)
    if phi_times_greater(len(mine), len(theirs)):
        return LemmaVerdict.MANY_CARDS
    if mine and (not theirs or min(mine) > max(theirs)) and phi_times_less(len(theirs), len(mine)):
        return LemmaVerdict.HIGH_CARDS
    return LemmaVerdict.NONE


def classify_lemma(pos: Position) -> dict[Player, LemmaVerdict]:
    """Which forced-win pattern, if any, applies for each player."""
    return {p: verdict_for(pos, p) for p in Player}


class _ManyPhase(NamedTuple):
    reserve: frozenset[int]  # phase-start cards not yet played
    start_count: int
    start_opp: int
    from_premise: bool  # phase opened with count > phi * opponent count


class _HighPhase(NamedTuple):
    snapshot: frozenset[int]  # cards still to play once each
    count: int
    opp: int
    size: int


class LemmaStrategy(Strategy):
    """Phased policy that converts either pattern into a forced win.

    * many-cards phase: play the lowest card among those held when the phase
      began, ignoring cards captured meanwhile, until every opposing card is
      below every such card still held;
    * high-cards phase: play each of those remaining cards once, lowest
      first, winning every battle; then a new many-cards phase begins.

    Playing the lowest *current* card instead is refutable: from
    ``1,2,3,4,5/6,7,8`` Bob wins a battle with a card he captured, because
    Alice recaptured an even lower one and played it.

    Hand-size invariants are checked at every phase switch and raise
    :class:`LemmaInvariantError` if violated; ``switches_checked`` counts the
    checks performed.
    """

    name = "lemma"

    def __init__(self) -> None:
        self.switches_checked = 0

    def start(self, pos: Position, player: Player) -> Hashable:
        if verdict_for(pos, player) is LemmaVerdict.NONE:
            raise LemmaNotApplicable(f"neither pattern applies to {player.value} in {pos}")
        return self._advance(self._open(pos, player), pos, player)

    @staticmethod
    def _open(pos: Position, player: Player) -> _ManyPhase:
        mine, theirs = pos.hand(player), pos.hand(player.opponent)
        return _ManyPhase(
            frozenset(mine), len(mine), len(theirs), phi_times_greater(len(mine), len(theirs))
        )

    def _fail(self, what: str, pos: Position, player: Player) -> None:
        raise LemmaInvariantError(f"{what} ({player.value} in {pos})")

    def _advance(self, memory, pos: Position, player: Player):
        if is_terminal(pos) is not None:
            return memory
        mine, theirs = pos.hand(player), pos.hand(player.opponent)
        a, b = len(mine), len(theirs)
        if isinstance(memory, _HighPhase) and not memory.snapshot:
            self.switches_checked += 1
            if a != memory.count or b != memory.opp - memory.size:
                self._fail("high-cards phase lost a battle", pos, player)
            if not phi_times_greater(a, b):
                self._fail(f"after high-cards phase {a} <= phi * {b}", pos, player)
            memory = self._open(pos, player)
        if isinstance(memory, _ManyPhase) and not memory.reserve:
            # every phase-start card was spent before the opponent fell below
            self.switches_checked += 1
            if not phi_times_greater(a, b):
                self._fail(f"many-cards restart with {a} <= phi * {b}", pos, player)
            memory = self._open(pos, player)
        if isinstance(memory, _ManyPhase) and max(theirs) < min(memory.reserve):
            self.switches_checked += 1
            if b > memory.start_opp or a < memory.start_count - memory.start_opp:
                self._fail("many-cards phase lost more cards than the opponent spent", pos, player)
            if not phi_times_less(b, a):
                self._fail(f"after many-cards phase {b} >= phi * {a}", pos, player)
            if memory.from_premise and not phi_times_less(
                b, memory.start_count - memory.start_opp
            ):
                self._fail("opponent count not below phi * (a - b)", pos, player)
            memory = _HighPhase(memory.reserve, a, b, len(memory.reserve))
        return memory

    def choose(self, pos: Position, player: Player, memory: Hashable) -> int:
        if isinstance(memory, _HighPhase):
            return min(memory.snapshot)
        return min(memory.reserve)

    def observe(self, memory, player, own, other, after):
        if isinstance(memory, _HighPhase):
            memory = memory._replace(snapshot=memory.snapshot - {own})
        else:
            memory = memory._replace(reserve=memory.reserve - {own})
        return self._advance(memory, after, player)


def lemma_strategy(pos: Position, player: Player) -> LemmaStrategy:
    if verdict_for(pos, player) is LemmaVerdict.NONE:
        raise LemmaNotApplicable(f"neither pattern applies to {player.value} in {pos}")
    return LemmaStrategy()


def improvement_steps(pos: Position) -> list[Position]:
    """Every canonical position one elementary pro-Alice change away.

    The changes are: give Alice a new card in any gap between live ranks,
    delete a Bob card, hand a Bob card to Alice, and swap an adjacent pair
    where Alice holds the lower card and Bob the higher.
    """
    c = canonicalize(pos)
    owners = [o is Player.ALICE for o in c.ownership]
    m = len(owners)
    variants: list[list[bool]] = []
    for gap in range(m + 1):
        variants.append(owners[:gap] + [True] + owners[gap:])
    for i, alice in enumerate(owners):
        if not alice:
            variants.append(owners[:i] + owners[i + 1 :])
            variants.append(owners[:i] + [True] + owners[i + 1 :])
    for i in range(m - 1):
        if owners[i] and not owners[i + 1]:
            variants.append(owners[:i] + [False, True] + owners[i + 2 :])

    out: list[Position] = []
    seen = set()
    for v in variants:
        if not v:
            continue
        key = tuple(v)
        if key in seen:
            continue
        seen.add(key)
        out.append(
            Position(
                frozenset(i + 1 for i, a in enumerate(v) if a),
                frozenset(i + 1 for i, a in enumerate(v) if not a),
            )
        )
    return out


@dataclass(frozen=True)
class IntervalPlan:
    """Counting certificate that the attacker cannot force a win.

    ``allocations[j]`` is the number of defender cards from interval ``j + 2``
    set aside against the attacker's interval ``j + 1`` (1-based intervals,
    lowest first); ``leftover`` is what remains for the top interval.
    """

    k: int
    a_counts: tuple[int, ...]
    b_counts: tuple[int, ...]
    allocations: tuple[int, ...]
    leftover: int
    feasible: bool

    def to_json(self) -> dict:
        d = asdict(self)
        return {
            "k": d["k"],
            "aCounts": list(d["a_counts"]),
            "bCounts": list(d["b_counts"]),
            "allocations": list(d["allocations"]),
            "leftover": d["leftover"],
            "feasible": d["feasible"],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def interval_certificate(a_counts: Sequence[int], b_counts: Sequence[int]) -> IntervalPlan:
    """Greedy allocation of defender cards across rank intervals.

    The defender beats the attacker's cards in each interval with the fewest
    of its own cards from the next interval up that form a high-cards win,
    then needs its remaining cards to outnumber the attacker's top interval
    by more than phi.
    """
    if len(a_counts) != len(b_counts):
        raise LengthMismatch(f"{len(a_counts)} attacker counts vs {len(b_counts)} defender counts")
    if not a_counts:
        raise InvalidInput("need at least one interval")
    if any(x < 0 for x in (*a_counts, *b_counts)):
        raise InvalidInput("interval counts must be nonnegative")
    k = len(a_counts)
    allocations = []
    fits = True
    for i in range(k - 1):
        x = min_cover(a_counts[i])
        if x > b_counts[i + 1]:
            fits = False
            x = b_counts[i + 1]
        allocations.append(x)
    leftover = b_counts[0] + sum(b_counts[i + 1] - allocations[i] for i in range(k - 1))
    feasible = fits and phi_times_greater(leftover, a_counts[-1])
    return IntervalPlan(k, tuple(a_counts), tuple(b_counts), tuple(allocations), leftover, feasible)


def interval_bounds(n: int, k: int) -> list[tuple[int, int]]:
    """Rank ranges ``(lo, hi]`` splitting ``1..n`` into ``k`` pieces by floor division."""
    return [((i - 1) * n // k, i * n // k) for i in range(1, k + 1)]


def interval_counts(pos: Position, k: int) -> tuple[list[int], list[int]]:
    """Alice's and Bob's card counts per interval of the canonical ranks."""
    c = canonicalize(pos)
    a_counts, b_counts = [], []
    for lo, hi in interval_bounds(c.live_count, k):
        owners = c.ownership[lo:hi]
        a_counts.append(sum(o is Player.ALICE for o in owners))
        b_counts.append(sum(o is Player.BOB for o in owners))
    return a_counts, b_counts


def certify(pos: Position, k: int, defender: Player = Player.BOB) -> IntervalPlan:
    """Certificate for ``defender`` on the dealt position split into ``k`` intervals."""
    if k < 1 or k > pos.live_count:
        raise InvalidInput(f"k must be within 1..{pos.live_count}, got {k}")
    a_counts, b_counts = interval_counts(pos, k)
    if defender is Player.BOB:
        return interval_certificate(a_counts, b_counts)
    return interval_certificate(b_counts, a_counts)
