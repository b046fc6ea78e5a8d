"""Random dealing, exhaustive census and Monte Carlo estimators.

Three estimators share one row format (:class:`EstimateRow`):

* solver mode deals small hands and looks their outcome up in the table;
* certificate mode only draws per-interval card counts, so ``n`` may be huge;
* count-only mode checks whether Alice's hand is more than phi times Bob's.
"""

from __future__ import annotations

import csv
import enum
import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from scipy.stats import binom
from statsmodels.stats.proportion import proportion_confint

from .errors import CapacityExceeded, InvalidInput, InvalidK, InvalidTrials
from .game import Position
from .lemma import interval_bounds, interval_certificate, phi_times_greater
from .seeding import mix_seed
from .solver import Outcome, SolverTable

CSV_HEADER = ("model", "r", "n", "k", "trials", "seed", "alice_win", "bob_win", "draw", "rate", "ci_lo", "ci_hi")
DEFAULT_SEED = 2718


class DealKind(enum.Enum):
    UNBIASED_IID = "ui"
    UNBIASED_EXACT = "ue"
    BIASED_IID = "bi"
    BIASED_EXACT = "be"

    @property
    def iid(self) -> bool:
        return self in (DealKind.UNBIASED_IID, DealKind.BIASED_IID)

    @property
    def biased(self) -> bool:
        return self in (DealKind.BIASED_IID, DealKind.BIASED_EXACT)


def parse_ratio(text: str | Fraction | int) -> Fraction:
    """``"3/2"``, ``"1.7"`` or ``"2"`` as an exact fraction."""
    if isinstance(text, (Fraction, int)):
        return Fraction(text)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"bad ratio {text!r}; use p/q or a decimal") from None


def ratio_text(r: Fraction) -> str:
    """Decimal rendering used in CSV rows (exact when it terminates)."""
    if r.denominator == 1:
        return str(r.numerator)
    text = f"{float(r):.6f}".rstrip("0")
    return text


@dataclass(frozen=True)
class DealModel:
    """How the ``n`` cards labelled ``1..n`` are split between the players.

    IID kinds give each card to Alice with probability ``r / (r + 1)``; exact
    kinds give Alice exactly ``round(n * r / (r + 1))`` cards chosen uniformly.
    """

    kind: DealKind
    n: int
    r: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", parse_ratio(self.r))
        if self.n < 2:
            raise InvalidInput(f"need at least 2 cards, got n={self.n}")
        if self.r < 1:
            raise InvalidInput(f"bias ratio must be >= 1, got {self.r}")
        if not self.kind.biased and self.r != 1:
            raise InvalidInput(f"unbiased model {self.kind.value} needs r = 1, got {self.r}")
        if self.kind is DealKind.UNBIASED_EXACT and self.n % 2:
            raise InvalidInput(f"exact-half dealing needs even n, got {self.n}")
        if not self.kind.iid and not 0 < self.alice_count < self.n:
            raise InvalidInput(f"exact dealing of {self.n} cards at r={self.r} leaves a hand empty")

    @property
    def alice_prob(self) -> Fraction:
        return self.r / (self.r + 1)

    @property
    def alice_count(self) -> int:
        # round half up
        return int(self.n * self.alice_prob + Fraction(1, 2))

    @property
    def label(self) -> str:
        return self.kind.value


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(mix_seed(seed, index)))


def _deal_flags(model: DealModel, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Boolean ownership (True = Alice) for cards 1..n and the redeal count."""
    rejections = 0
    while True:
        if model.kind.iid:
            flags = rng.random(model.n) < float(model.alice_prob)
        else:
            flags = np.zeros(model.n, dtype=bool)
            flags[rng.choice(model.n, model.alice_count, replace=False)] = True
        if flags.any() and not flags.all():
            return flags, rejections
        rejections += 1


def sample_deal(model: DealModel, seed: int, trial_index: int) -> Position:
    """Deterministic random deal for trial ``trial_index`` of an experiment."""
    flags, _ = _deal_flags(model, trial_rng(seed, trial_index))
    cards = np.arange(1, model.n + 1)
    return Position.of(cards[flags].tolist(), cards[~flags].tolist())


def _flags_to_mask(flags: np.ndarray) -> int:
    return int(np.dot(flags.astype(np.int64), np.left_shift(np.int64(1), np.arange(flags.size, dtype=np.int64))))


def wilson(successes: int, trials: int) -> tuple[float, float]:
    lo, hi = proportion_confint(successes, trials, alpha=0.05, method="wilson")
    rate = successes / trials
    return min(float(lo), rate), max(float(hi), rate)


@dataclass(frozen=True)
class EstimateRow:
    model: str
    r: str
    n: int
    k: int
    trials: int
    seed: int
    alice_win: int
    bob_win: int
    draw: int
    rate: float
    ci_lo: float
    ci_hi: float
    rejections: int = field(default=0, compare=False)

    def as_csv_row(self) -> list:
        return [
            self.model, self.r, self.n, self.k, self.trials, self.seed,
            self.alice_win, self.bob_win, self.draw,
            f"{self.rate:.6f}", f"{self.ci_lo:.6f}", f"{self.ci_hi:.6f}",
        ]

    def interval(self, count: int) -> tuple[float, float]:
        """Wilson interval for any of the row's counts."""
        return wilson(count, self.trials)


def _row(model: str, r: Fraction, n: int, k: int, trials: int, seed: int,
         a: int, b: int, d: int, hits: int, rejections: int = 0) -> EstimateRow:
    lo, hi = wilson(hits, trials)
    return EstimateRow(model, ratio_text(r), n, k, trials, seed, a, b, d, hits / trials, lo, hi, rejections)


def write_csv(rows: Iterable[EstimateRow], fh: io.TextIOBase) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv_row())


# --- census -------------------------------------------------------------------


@dataclass(frozen=True)
class CensusReport:
    n: int
    alice_win: int
    bob_win: int
    draw: int
    draws: tuple[Position, ...]

    @property
    def total(self) -> int:
        return self.alice_win + self.bob_win + self.draw

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "deals": self.total,
            "alice_win": self.alice_win,
            "bob_win": self.bob_win,
            "draw": self.draw,
            "draws": [p.to_text() for p in self.draws],
        }


def _outcome_arrays(table: SolverTable, n: int) -> tuple[np.ndarray, np.ndarray]:
    if n > table.m_max:
        raise CapacityExceeded(f"n={n} exceeds table capacity {table.m_max}")
    return table.wa_level(n).astype(bool), table.wb_level(n).astype(bool)


def census(n: int, table: SolverTable) -> CensusReport:
    """Tally outcomes of all ``2**n - 2`` deals of cards ``1..n`` with both hands nonempty."""
    if n < 2:
        raise InvalidInput(f"census needs n >= 2, got {n}")
    wa, wb = _outcome_arrays(table, n)
    wa, wb = wa[1:-1], wb[1:-1]
    drawn = np.flatnonzero(~wa & ~wb) + 1
    return CensusReport(
        n,
        int(wa.sum()),
        int(wb.sum()),
        int(drawn.size),
        tuple(Position.from_mask(int(mask), n) for mask in drawn),
    )


# --- solver-backed estimates ------------------------------------------------------


def estimate_draw_rate(
    model: DealModel,
    trials: int,
    seed: int,
    table: SolverTable,
    exact: bool = False,
) -> EstimateRow:
    """Monte Carlo (or exhaustive, with ``exact=True``) outcome tallies."""
    wa, wb = _outcome_arrays(table, model.n)
    if exact:
        return _enumerate_draw_rate(model, wa, wb)
    if trials <= 0:
        raise InvalidTrials(f"trials must be positive, got {trials}")
    masks = np.empty(trials, dtype=np.int64)
    rejections = 0
    for t in range(trials):
        flags, rej = _deal_flags(model, trial_rng(seed, t))
        masks[t] = _flags_to_mask(flags)
        rejections += rej
    a = int(wa[masks].sum())
    b = int(wb[masks].sum())
    d = trials - a - b
    return _row(model.label, model.r, model.n, 0, trials, seed, a, b, d, d, rejections)


def _popcounts(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (masks >> i) & 1
    return counts


def _enumerate_draw_rate(model: DealModel, wa: np.ndarray, wb: np.ndarray) -> EstimateRow:
    if model.kind is DealKind.UNBIASED_IID:
        select = np.ones(wa.size, dtype=bool)
    elif model.kind is DealKind.UNBIASED_EXACT:
        select = _popcounts(model.n) == model.n // 2
    else:
        raise InvalidInput("exhaustive enumeration weights deals equally; use exact_outcome_probabilities for biased models")
    trials = int(select.sum())
    a = int((wa & select).sum())
    b = int((wb & select).sum())
    d = trials - a - b
    return _row(model.label + "-exact", model.r, model.n, 0, trials, 0, a, b, d, d)


def exact_outcome_probabilities(model: DealModel, table: SolverTable) -> dict[Outcome, Fraction]:
    """Exact outcome distribution of the dealing model, given both hands are nonempty."""
    wa, wb = _outcome_arrays(table, model.n)
    pc = _popcounts(model.n)
    n = model.n
    per_count = {}
    for a in range(1, n):
        sel = pc == a
        alice = int((wa & sel).sum())
        bob = int((wb & sel).sum())
        per_count[a] = (alice, bob, comb(n, a) - alice - bob)
    if model.kind.iid:
        p = model.alice_prob
        weights = {a: p**a * (1 - p) ** (n - a) for a in per_count}
    else:
        weights = {a: Fraction(int(a == model.alice_count)) for a in per_count}
    total = sum(weights[a] * comb(n, a) for a in per_count)
    result = {o: Fraction(0) for o in Outcome}
    for a, (alice, bob, draw) in per_count.items():
        w = weights[a] / total
        result[Outcome.ALICE_WIN] += w * alice
        result[Outcome.BOB_WIN] += w * bob
        result[Outcome.DRAW] += w * draw
    return result


# --- counting-only estimates --------------------------------------------------------


def _interval_alice_counts(model: DealModel, sizes: Sequence[int], rng: np.random.Generator) -> tuple[np.ndarray, int]:
    rejections = 0
    sizes_arr = np.asarray(sizes, dtype=np.int64)
    while True:
        if model.kind.iid:
            u = rng.random(len(sizes))
            counts = binom.ppf(u, sizes_arr, float(model.alice_prob)).astype(np.int64)
        else:
            counts = rng.multivariate_hypergeometric(sizes_arr, model.alice_count).astype(np.int64)
        total = int(counts.sum())
        if 0 < total < model.n:
            return counts, rejections
        rejections += 1


def estimate_certificate_rate(model: DealModel, k: int, trials: int, seed: int) -> EstimateRow:
    """How often the interval certificate rules out an Alice win."""
    if k < 2 or k > model.n:
        raise InvalidK(f"k must be within 2..n={model.n}, got {k}")
    if trials <= 0:
        raise InvalidTrials(f"trials must be positive, got {trials}")
    sizes = [hi - lo for lo, hi in interval_bounds(model.n, k)]
    feasible = 0
    rejections = 0
    for t in range(trials):
        a_counts, rej = _interval_alice_counts(model, sizes, trial_rng(seed, t))
        rejections += rej
        b_counts = [s - int(a) for s, a in zip(sizes, a_counts)]
        if interval_certificate([int(a) for a in a_counts], b_counts).feasible:
            feasible += 1
    return _row(f"cert-{model.label}", model.r, model.n, k, trials, seed,
                feasible, trials - feasible, 0, feasible, rejections)


def estimate_count_rate(model: DealModel, trials: int, seed: int) -> EstimateRow:
    """How often Alice's hand alone exceeds phi times Bob's."""
    if trials <= 0:
        raise InvalidTrials(f"trials must be positive, got {trials}")
    hits = 0
    rejections = 0
    for t in range(trials):
        counts, rej = _interval_alice_counts(model, [model.n], trial_rng(seed, t))
        rejections += rej
        a = int(counts[0])
        hits += phi_times_greater(a, model.n - a)
    return _row(f"count-{model.label}", model.r, model.n, 0, trials, seed,
                hits, trials - hits, 0, hits, rejections)


class SweepMode(enum.Enum):
    SOLVER = "solver"
    CERTIFICATE = "certificate"
    COUNT_ONLY = "countonly"


def sweep(
    r_values: Sequence[Fraction | str],
    n_values: Sequence[int],
    kind: DealKind,
    trials: int,
    seed: int,
    mode: SweepMode,
    table: SolverTable | None = None,
    k: int = 5,
    exact: bool = False,
) -> list[EstimateRow]:
    """One row per ``(r, n)`` grid point, ``r`` varying slowest."""
    if mode is SweepMode.SOLVER:
        if table is None:
            raise InvalidInput("solver mode needs a table")
        if max(n_values) > table.m_max:
            raise CapacityExceeded(f"n={max(n_values)} exceeds table capacity {table.m_max}")
    rows = []
    for r in r_values:
        for n in n_values:
            model = DealModel(kind, n, parse_ratio(r))
            if mode is SweepMode.SOLVER:
                rows.append(estimate_draw_rate(model, trials, seed, table, exact=exact))
            elif mode is SweepMode.CERTIFICATE:
                rows.append(estimate_certificate_rate(model, k, trials, seed))
            else:
                rows.append(estimate_count_rate(model, trials, seed))
    return rows
