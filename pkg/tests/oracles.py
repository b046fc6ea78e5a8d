"""Reference implementations used only by the tests.

They share no code with the package's hot paths: positions are tuples of
owners (``"A"``/``"B"``) indexed by ascending rank, and the recursion is the
plain top-down definition of a forced win.
"""

from __future__ import annotations

from decimal import Decimal, getcontext
from functools import lru_cache

from peerpressure.game import Player, Position, is_terminal, successor


def battle(owners: tuple[str, ...], i: int, j: int) -> tuple[str, ...]:
    """Alice plays rank index ``i``, Bob plays ``j``."""
    high, low = max(i, j), min(i, j)
    out = list(owners)
    out[low] = owners[high]
    del out[high]
    return tuple(out)


@lru_cache(maxsize=None)
def alice_forces(owners: tuple[str, ...]) -> bool:
    if "B" not in owners:
        return True
    if "A" not in owners:
        return False
    alice = [i for i, o in enumerate(owners) if o == "A"]
    bob = [j for j, o in enumerate(owners) if o == "B"]
    return any(all(alice_forces(battle(owners, i, j)) for j in bob) for i in alice)


@lru_cache(maxsize=None)
def bob_forces(owners: tuple[str, ...]) -> bool:
    if "A" not in owners:
        return True
    if "B" not in owners:
        return False
    alice = [i for i, o in enumerate(owners) if o == "A"]
    bob = [j for j, o in enumerate(owners) if o == "B"]
    return any(all(bob_forces(battle(owners, i, j)) for i in alice) for j in bob)


def owners_of_mask(mask: int, m: int) -> tuple[str, ...]:
    return tuple("A" if mask >> i & 1 else "B" for i in range(m))


def owners_of(pos: Position) -> tuple[str, ...]:
    return tuple("A" if c in pos.alice else "B" for c in sorted(pos.alice | pos.bob))


getcontext().prec = 50
PHI_50 = (1 + Decimal(5).sqrt()) / 2


def phi_greater_numeric(a: int, b: int) -> bool:
    return Decimal(a) > PHI_50 * b


def phi_less_numeric(a: int, b: int) -> bool:
    return Decimal(a) < PHI_50 * b


def reduced_strategies(pos: Position, player: Player = Player.ALICE):
    """Every positional strategy of ``player``, restricted to positions it can reach.

    Yields dicts mapping positions to the chosen card.  Two strategies that
    agree on all positions reachable under them are the same game plan, so
    this covers every positional strategy up to unreachable choices.
    """

    def reach(p: Position, card: int) -> list[Position]:
        out = []
        for reply in p.hand(player.opponent):
            a, b = (card, reply) if player is Player.ALICE else (reply, card)
            nxt = successor(p, a, b)
            if is_terminal(nxt) is None:
                out.append(nxt)
        return out

    def extend(assigned: dict, frontier: list[Position]):
        while frontier and frontier[-1] in assigned:
            frontier = frontier[:-1]
        if not frontier:
            yield dict(assigned)
            return
        p, rest = frontier[-1], frontier[:-1]
        for card in sorted(p.hand(player)):
            assigned[p] = card
            yield from extend(assigned, rest + reach(p, card))
            del assigned[p]

    if is_terminal(pos) is not None:
        yield {}
        return
    yield from extend({}, [pos])
