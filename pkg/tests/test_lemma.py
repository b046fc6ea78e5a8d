from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, strategies as st

from oracles import phi_greater_numeric, phi_less_numeric
from peerpressure.errors import LemmaNotApplicable, LengthMismatch
from peerpressure.game import Player, Position, is_terminal, play_out, random_strategy, lowest_strategy
from peerpressure.lemma import (
    LemmaStrategy,
    LemmaVerdict,
    certify,
    classify_lemma,
    improvement_steps,
    interval_bounds,
    interval_certificate,
    interval_counts,
    lemma_strategy,
    min_cover,
    phi_times_greater,
    phi_times_less,
    verdict_for,
)
from peerpressure.solver import Outcome, best_response

P = Position.parse
A, B = Player.ALICE, Player.BOB


def fibonacci(limit):
    fib = [1, 2]
    while fib[-1] + fib[-2] <= limit:
        fib.append(fib[-1] + fib[-2])
    return fib


class TestPhiComparator:
    def test_examples(self):
        assert not phi_times_less(5, 3) and phi_times_greater(5, 3)
        assert phi_times_less(8, 5) and not phi_times_greater(8, 5)
        assert not phi_times_less(1, 0) and phi_times_greater(1, 0)
        assert not phi_times_less(0, 0) and not phi_times_greater(0, 0)

    def test_fibonacci_alternation(self):
        fib = fibonacci(10**12)
        sides = [phi_times_greater(fib[i + 1], fib[i]) for i in range(len(fib) - 1)]
        assert all(x != y for x, y in zip(sides, sides[1:]))

    def test_huge_integers(self):
        # F(300)/F(299) sits within 1e-120 of phi; floats cannot separate it
        fib = [1, 1]
        for _ in range(300):
            fib.append(fib[-1] + fib[-2])
        a, b = fib[-1], fib[-2]
        assert phi_times_greater(a, b) != phi_times_greater(fib[-2], fib[-3])
        assert phi_times_greater(a, b) == phi_greater_numeric(a, b) or a > 10**50

    @given(st.integers(0, 5000), st.integers(0, 5000))
    def test_trichotomy_and_oracle(self, a, b):
        greater, less = phi_times_greater(a, b), phi_times_less(a, b)
        if (a, b) == (0, 0):
            assert not greater and not less
        else:
            assert greater != less
            assert greater == phi_greater_numeric(a, b)
            assert less == phi_less_numeric(a, b)

    @given(st.integers(0, 10**6))
    def test_min_cover(self, a):
        x = min_cover(a)
        if a == 0:
            assert x == 0
        else:
            assert phi_times_less(a, x) and not phi_times_less(a, x - 1)


class TestClassify:
    def test_examples(self):
        assert classify_lemma(P("1,2/3"))[A] is LemmaVerdict.MANY_CARDS
        assert classify_lemma(P("4,5,6/1,2,3"))[A] is LemmaVerdict.HIGH_CARDS
        verdicts = classify_lemma(P("1,2,4/3,5"))
        assert verdicts[A] is LemmaVerdict.NONE and verdicts[B] is LemmaVerdict.NONE

    def test_bob_side(self):
        assert classify_lemma(P("5/1,2,3,4,6,7,8,9"))[B] is LemmaVerdict.MANY_CARDS
        assert classify_lemma(P("1,2,3/4,5"))[B] is LemmaVerdict.HIGH_CARDS

    def test_high_cards_boundary(self):
        # 4 < 3 phi < 5
        assert verdict_for(P("1,2,3,4/5,6,7"), B) is LemmaVerdict.HIGH_CARDS
        assert verdict_for(P("1,2,3,4,5/6,7,8"), B) is LemmaVerdict.NONE

    def test_sound_against_solver(self, table):
        for m in range(1, 11):
            for mask in range(1 << m):
                pos = Position.from_mask(mask, m)
                for player, verdict in classify_lemma(pos).items():
                    if verdict is not LemmaVerdict.NONE:
                        assert table.wins(pos, player), (pos, player)


class TestLemmaStrategy:
    def test_many_cards_example(self):
        t = play_out(P("1,2/3"), lemma_strategy(P("1,2/3"), A), lowest_strategy())
        assert [(b.alice_played, b.bob_played) for b in t.battles] == [(1, 3), (2, 1)]
        assert t.final_winner is A

    def test_high_cards_example(self):
        pos = P("4,5,6/1,2,3")
        for seed in range(20):
            strat = lemma_strategy(pos, A)
            t = play_out(pos, strat, random_strategy(seed))
            assert [b.alice_played for b in t.battles] == [4, 5, 6]
            assert all(b.winner is A for b in t.battles)
            assert t.final_winner is A and len(t.final.alice) == 3

    def test_not_applicable(self):
        with pytest.raises(LemmaNotApplicable):
            lemma_strategy(P("1,2,4/3,5"), A)
        with pytest.raises(LemmaNotApplicable):
            LemmaStrategy().start(P("1,2,4/3,5"), B)

    def test_literal_lowest_card_is_refutable(self, table):
        pos = P("1,2,3,4,5/6,7,8")
        assert verdict_for(pos, A) is LemmaVerdict.MANY_CARDS
        report = best_response(pos, lowest_strategy(), B)
        assert report.beaten
        assert not best_response(pos, LemmaStrategy(), B).beaten

    def test_ignores_recaptured_cards(self):
        # Bob takes 1 with 6, then feeds it back: Alice keeps playing her start cards
        strat = LemmaStrategy()
        pos = P("1,2,3,4,5/6,7,8")
        mem = strat.start(pos, A)
        assert strat.choose(pos, A, mem) == 1
        from peerpressure.game import successor

        nxt = successor(pos, 1, 6)
        mem = strat.observe(mem, A, 1, 6, nxt)
        nxt2 = successor(nxt, 2, 1)
        mem = strat.observe(mem, A, 2, 1, nxt2)
        assert nxt2 == P("1,3,4,5/7,8")
        assert strat.choose(nxt2, A, mem) == 3

    def test_random_opponents(self):
        rng = random.Random(11)
        count = 0
        while count < 40:
            m = rng.randint(3, 12)
            pos = Position.from_mask(rng.randrange(1, (1 << m) - 1), m)
            for player in Player:
                if verdict_for(pos, player) is LemmaVerdict.NONE:
                    continue
                count += 1
                for seed in range(25):
                    opp = random_strategy(seed)
                    strat = LemmaStrategy()
                    if player is A:
                        t = play_out(pos, strat, opp)
                    else:
                        t = play_out(pos, opp, strat)
                    assert t.final_winner is player


class TestImprovementSteps:
    def test_examples(self):
        steps = improvement_steps(P("1/2"))
        assert P("2/1") in steps
        assert P("1/-") in steps
        assert P("1,2/-") in steps

    def test_kinds(self):
        steps = improvement_steps(P("1,2,4/3,5"))
        expected = {
            # insertions that change the shape
            "1,2,3,5/4,6", "1,2,4,5/3,6", "1,2,4,6/3,5",
            # deletions
            "1,2,3/4", "1,2,4/3",
            # transfers
            "1,2,3,4/5", "1,2,4,5/3",
            # swaps of an Alice card just below a Bob card
            "1,3,4/2,5", "1,2,5/3,4",
        }
        assert {s.to_text() for s in steps} == expected
        assert len(steps) == len(expected)

    def test_every_step_is_pro_alice(self, table):
        for m in range(1, 9):
            for mask in range(1 << m):
                pos = Position.from_mask(mask, m)
                for nxt in improvement_steps(pos):
                    assert nxt.live_count in (m - 1, m, m + 1)
                    assert len(nxt.alice) >= len(pos.alice)
                    assert len(nxt.bob) <= len(pos.bob)


class TestIntervalCertificate:
    def test_five_interval_constants(self):
        plan = interval_certificate([10100] * 5, [9900] * 5)
        assert plan.allocations == (6243,) * 4
        assert plan.leftover == 24528
        assert plan.feasible
        assert phi_times_greater(24528, 10100)

    def test_two_intervals_infeasible(self):
        plan = interval_certificate([10, 10], [10, 10])
        assert plan.allocations == (7,)
        assert plan.leftover == 13
        assert not plan.feasible

    def test_single_interval(self):
        plan = interval_certificate([0], [1])
        assert plan.feasible and plan.leftover == 1 and plan.allocations == ()

    def test_allocation_overflow(self):
        plan = interval_certificate([10, 0], [10, 3])
        assert not plan.feasible and plan.allocations == (3,)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            interval_certificate([1, 2], [1])

    def test_json(self):
        plan = interval_certificate([10, 10], [10, 10])
        assert json.loads(plan.dumps()) == {
            "k": 2,
            "aCounts": [10, 10],
            "bCounts": [10, 10],
            "allocations": [7],
            "leftover": 13,
            "feasible": False,
        }

    @given(st.lists(st.tuples(st.integers(0, 60), st.integers(0, 60)), min_size=1, max_size=8))
    def test_invariants(self, counts):
        a = [x for x, _ in counts]
        b = [y for _, y in counts]
        plan = interval_certificate(a, b)
        assert plan.leftover == b[0] + sum(b[i + 1] - plan.allocations[i] for i in range(len(a) - 1))
        assert all(x <= b[i + 1] for i, x in enumerate(plan.allocations))
        if plan.feasible:
            assert all(phi_times_less(a[i], plan.allocations[i]) or a[i] == 0 for i in range(len(a) - 1))
            assert phi_times_greater(plan.leftover, a[-1])

    def test_bounds(self):
        assert interval_bounds(10, 5) == [(0, 2), (2, 4), (4, 6), (6, 8), (8, 10)]
        assert [hi - lo for lo, hi in interval_bounds(10, 4)] == [2, 3, 2, 3]

    def test_counts_and_mirror(self):
        pos = P("1,2,4,3/5,6,7,8")
        assert interval_counts(pos, 2) == ([4, 0], [0, 4])
        assert certify(pos, 2, B).feasible
        assert not certify(pos, 2, A).feasible

    def test_sound_on_small_deals(self, table):
        rng = random.Random(5)
        feasible = 0
        for _ in range(400):
            m = rng.randint(6, 16)
            pos = Position.from_mask(rng.randrange(1, (1 << m) - 1), m)
            for k in range(1, min(m, 5) + 1):
                if certify(pos, k, B).feasible:
                    feasible += 1
                    assert table.outcome(pos) is not Outcome.ALICE_WIN, (pos, k)
                if certify(pos, k, A).feasible:
                    assert table.outcome(pos) is not Outcome.BOB_WIN, (pos, k)
        assert feasible > 50
