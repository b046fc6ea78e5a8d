"""Cards, positions, the battle rule and a referee.

A position is two disjoint hands of distinct positive integers.  In a battle
both players reveal a card at once; the higher card leaves the game and the
lower card goes to the player who played the higher one.  Whoever runs out
of cards loses.

Only the relative order of live cards matters, so positions are compressed to
ranks ``1..m`` and encoded as an *ownership mask*: bit ``i`` is set when Alice
holds compressed rank ``i + 1``.
"""

from __future__ import annotations

import enum
import json
import random
from collections.abc import Callable, Hashable, Iterable
from dataclasses import dataclass, field

from .errors import (
    BothEmpty,
    CardNotHeld,
    InvalidInput,
    OverlapError,
    RoundLimitExceeded,
    StrategyError,
    TerminalPosition,
)
from .seeding import mix_seed


class Player(enum.Enum):
    ALICE = "alice"
    BOB = "bob"

    @property
    def opponent(self) -> Player:
        return Player.BOB if self is Player.ALICE else Player.ALICE

    @classmethod
    def parse(cls, text: str) -> Player:
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise InvalidInput(f"unknown player {text!r}; use 'alice' or 'bob'") from None


@dataclass(frozen=True)
class Position:
    """Alice's and Bob's hands.  Immutable and hashable."""

    alice: frozenset[int]
    bob: frozenset[int]

    def __post_init__(self) -> None:
        for side in (self.alice, self.bob):
            for card in side:
                if not isinstance(card, int) or isinstance(card, bool) or card < 1:
                    raise InvalidInput(f"card labels must be positive integers, got {card!r}")
        common = self.alice & self.bob
        if common:
            raise OverlapError(f"cards held by both players: {sorted(common)}")

    @classmethod
    def of(cls, alice: Iterable[int], bob: Iterable[int]) -> Position:
        alice, bob = list(alice), list(bob)
        for name, side in (("alice", alice), ("bob", bob)):
            if len(set(side)) != len(side):
                raise InvalidInput(f"duplicate card in {name}'s hand: {sorted(side)}")
        return cls(frozenset(alice), frozenset(bob))

    @classmethod
    def from_mask(cls, mask: int, m: int) -> Position:
        """Position over ranks ``1..m`` where set bits belong to Alice."""
        if mask < 0 or mask >> m:
            raise InvalidInput(f"mask {mask:#x} does not fit in {m} cards")
        alice = frozenset(i + 1 for i in range(m) if mask >> i & 1)
        bob = frozenset(i + 1 for i in range(m) if not mask >> i & 1)
        return cls(alice, bob)

    @classmethod
    def parse(cls, text: str) -> Position:
        """Parse ``"1,2,4/3,5"`` (``-`` for an empty side) or the JSON form."""
        text = text.strip()
        if text.startswith("{"):
            return cls.from_json(text)
        parts = text.split("/")
        if len(parts) != 2:
            raise InvalidInput(f"position {text!r} must look like '1,2,4/3,5'")
        hands = []
        for part in parts:
            part = part.strip()
            if part in ("-", ""):
                hands.append([])
                continue
            try:
                hands.append([int(tok) for tok in part.split(",")])
            except ValueError:
                raise InvalidInput(f"bad card list {part!r} in {text!r}") from None
        return cls.of(*hands)

    @classmethod
    def from_json(cls, text: str | dict) -> Position:
        data = json.loads(text) if isinstance(text, str) else text
        try:
            return cls.of(data["alice"], data["bob"])
        except (KeyError, TypeError):
            raise InvalidInput('JSON position needs "alice" and "bob" lists') from None

    def to_text(self) -> str:
        def side(cards: frozenset[int]) -> str:
            return ",".join(map(str, sorted(cards))) if cards else "-"

        return f"{side(self.alice)}/{side(self.bob)}"

    def to_json(self) -> dict:
        return {"alice": sorted(self.alice), "bob": sorted(self.bob)}

    def __str__(self) -> str:
        return self.to_text()

    def hand(self, player: Player) -> frozenset[int]:
        return self.alice if player is Player.ALICE else self.bob

    @property
    def live_count(self) -> int:
        return len(self.alice) + len(self.bob)

    def mirror(self) -> Position:
        """Swap the players' hands."""
        return Position(self.bob, self.alice)

    def canonical(self) -> Position:
        """The order-isomorphic position over ranks ``1..m``."""
        c = canonicalize(self)
        return Position.from_mask(c.mask, c.live_count)


@dataclass(frozen=True)
class CanonicalPosition:
    live_count: int
    ownership: tuple[Player, ...]
    rank_map: dict[int, int] = field(compare=False, hash=False)

    @property
    def mask(self) -> int:
        return sum(1 << i for i, owner in enumerate(self.ownership) if owner is Player.ALICE)

    def decode(self, compressed: int) -> int:
        """Original label of compressed rank ``compressed``."""
        for original, rank in self.rank_map.items():
            if rank == compressed:
                return original
        raise KeyError(compressed)


def canonicalize(pos: Position) -> CanonicalPosition:
    """Compress live ranks to ``1..m`` preserving order."""
    if pos.alice & pos.bob:
        raise OverlapError(f"cards held by both players: {sorted(pos.alice & pos.bob)}")
    live = sorted(pos.alice | pos.bob)
    rank_map = {card: i + 1 for i, card in enumerate(live)}
    ownership = tuple(Player.ALICE if card in pos.alice else Player.BOB for card in live)
    return CanonicalPosition(len(live), ownership, rank_map)


def canonical_mask(pos: Position) -> int:
    """Ownership mask of ``pos`` without building the rank map."""
    mask = 0
    for i, card in enumerate(sorted(pos.alice | pos.bob)):
        if card in pos.alice:
            mask |= 1 << i
    return mask


def is_terminal(pos: Position) -> Player | None:
    """The winner if one side has run out of cards, else ``None``."""
    if not pos.alice and not pos.bob:
        raise BothEmpty("both hands are empty")
    if not pos.bob:
        return Player.ALICE
    if not pos.alice:
        return Player.BOB
    return None


def successor(pos: Position, a_card: int, b_card: int) -> Position:
    """Resolve one battle where Alice plays ``a_card`` and Bob ``b_card``."""
    if not pos.alice or not pos.bob:
        raise TerminalPosition(f"no battle possible in {pos}")
    if a_card not in pos.alice:
        raise CardNotHeld(f"Alice does not hold {a_card} in {pos}")
    if b_card not in pos.bob:
        raise CardNotHeld(f"Bob does not hold {b_card} in {pos}")
    if a_card > b_card:
        return Position(pos.alice - {a_card} | {b_card}, pos.bob - {b_card})
    return Position(pos.alice - {a_card}, pos.bob - {b_card} | {a_card})


def mask_successor(mask: int, low: int, high: int) -> int:
    """Successor mask when compressed ranks ``low < high`` (0-based) meet.

    The holder of ``high`` wins: ``low`` takes ``high``'s owner bit and
    ``high`` is deleted, shifting the bits above it down by one.
    """
    owner = mask >> high & 1
    mask = mask & ~(1 << low) | owner << low
    return mask & ((1 << high) - 1) | (mask >> (high + 1)) << high


def dominates(c: Iterable[int], c_prime: Iterable[int]) -> bool:
    """True if hand ``c`` is at least as good as ``c_prime``.

    For each k, the k-th highest card of ``c`` must exist and be at least the
    k-th highest of ``c_prime`` whenever ``c_prime`` has a k-th card.
    """
    hi = sorted(c, reverse=True)
    lo = sorted(c_prime, reverse=True)
    if len(hi) < len(lo):
        return False
    return all(x >= y for x, y in zip(hi, lo))


# --- strategies and the referee ------------------------------------------------


class Strategy:
    """A deterministic policy for one player.

    Most policies are positional; phased ones keep a small hashable memory
    that the referee threads through the game: ``start`` gives the initial
    memory, ``choose`` picks a card, ``observe`` updates the memory after the
    battle has been resolved.  Neither hook ever sees the opponent's pending
    card.
    """

    name = "strategy"

    def start(self, pos: Position, player: Player) -> Hashable:
        return None

    def choose(self, pos: Position, player: Player, memory: Hashable) -> int:
        raise NotImplementedError

    def observe(
        self,
        memory: Hashable,
        player: Player,
        own: int,
        other: int,
        after: Position,
    ) -> Hashable:
        return memory

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class PositionalStrategy(Strategy):
    def __init__(self, name: str, rule: Callable[[Position, Player], int]) -> None:
        self.name = name
        self.rule = rule

    def choose(self, pos: Position, player: Player, memory: Hashable = None) -> int:
        return self.rule(pos, player)


def lowest_strategy() -> PositionalStrategy:
    return PositionalStrategy("lowest", lambda pos, player: min(pos.hand(player)))


def highest_strategy() -> PositionalStrategy:
    return PositionalStrategy("highest", lambda pos, player: max(pos.hand(player)))


def random_strategy(seed: int) -> PositionalStrategy:
    """Positional policy picking a pseudo-random card per position.

    The choice is a pure function of ``(seed, position)``, so the policy is
    reproducible and may be revealed to a best-response search.
    """

    def rule(pos: Position, player: Player) -> int:
        # int tuples hash identically across processes (no hash salting)
        key = hash((tuple(sorted(pos.alice)), tuple(sorted(pos.bob)), player is Player.ALICE))
        key &= (1 << 62) - 1
        rng = random.Random(mix_seed(seed, key))
        return rng.choice(sorted(pos.hand(player)))

    return PositionalStrategy(f"random:{seed}", rule)


@dataclass(frozen=True)
class Battle:
    alice_played: int
    bob_played: int
    winner: Player


@dataclass(frozen=True)
class Transcript:
    start: Position
    battles: tuple[Battle, ...]
    final: Position
    final_winner: Player

    def __len__(self) -> int:
        return len(self.battles)

    def to_text(self) -> str:
        lines = [f"start {self.start}"]
        pos = self.start
        for i, b in enumerate(self.battles, 1):
            pos = successor(pos, b.alice_played, b.bob_played)
            lines.append(
                f"{i:3d}. alice {b.alice_played} vs bob {b.bob_played} -> {b.winner.value} wins  [{pos}]"
            )
        lines.append(f"winner {self.final_winner.value}")
        return "\n".join(lines)


def _checked_choice(strategy: Strategy, pos: Position, player: Player, memory: Hashable) -> int:
    card = strategy.choose(pos, player, memory)
    if card not in pos.hand(player):
        raise StrategyError(f"{strategy.name} chose {card!r}, not held by {player.value} in {pos}")
    return card


def play_out(
    pos: Position,
    strat_a: Strategy,
    strat_b: Strategy,
    max_rounds: int | None = None,
) -> Transcript:
    """Play ``strat_a`` (Alice) against ``strat_b`` (Bob) to the end."""
    if max_rounds is None:
        max_rounds = pos.live_count
    start = pos
    mem_a = strat_a.start(pos, Player.ALICE) if pos.alice and pos.bob else None
    mem_b = strat_b.start(pos, Player.BOB) if pos.alice and pos.bob else None
    battles: list[Battle] = []
    while (winner := is_terminal(pos)) is None:
        if len(battles) >= max_rounds:
            raise RoundLimitExceeded(f"no winner after {max_rounds} battles from {start}")
        a = _checked_choice(strat_a, pos, Player.ALICE, mem_a)
        b = _checked_choice(strat_b, pos, Player.BOB, mem_b)
        pos = successor(pos, a, b)
        battles.append(Battle(a, b, Player.ALICE if a > b else Player.BOB))
        mem_a = strat_a.observe(mem_a, Player.ALICE, a, b, pos)
        mem_b = strat_b.observe(mem_b, Player.BOB, b, a, pos)
    return Transcript(start, tuple(battles), pos, winner)

