"""Command-line front end: ``peerpressure <subcommand> ...``.

Exit status is 0 on success, 2 on invalid input and 3 when a request needs
more live cards than the table may hold.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import resource
import sys
import time
import tracemalloc
from pathlib import Path

from .errors import CapacityExceeded, InvalidInput, PeerPressureError
from .experiments import (
    CSV_HEADER,
    DEFAULT_SEED,
    DealKind,
    SweepMode,
    census,
    parse_ratio,
    sweep,
    write_csv,
)
from .game import (
    Player,
    Position,
    Strategy,
    highest_strategy,
    is_terminal,
    lowest_strategy,
    play_out,
    random_strategy,
)
from .lemma import LemmaStrategy, certify, verdict_for, LemmaVerdict
from .solver import DEFAULT_M_MAX, HARD_CAP, Outcome, SolverTable, best_response, build_table, load_or_build

EXIT_OK, EXIT_INVALID, EXIT_CAPACITY = 0, 2, 3
POLICIES = ("lowest", "highest", "lemma", "solver", "random:<seed>")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 already; keep one message format
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(tok)) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _ratio_list(text: str) -> list:
    try:
        return [parse_ratio(tok) for tok in text.split(",") if tok]
    except InvalidInput as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--table", default=os.environ.get("PP_TABLE_PATH"),
                        help="table cache file (default: $PP_TABLE_PATH); rebuilt when missing")
    common.add_argument("--mmax", type=int, default=DEFAULT_M_MAX,
                        help=f"largest live-card count to solve (default {DEFAULT_M_MAX}, cap {HARD_CAP})")
    common.add_argument("--workers", type=int, default=None, help="threads for the table build")
    common.add_argument("--out", type=Path, help="write machine-readable output here")
    common.add_argument("--format", choices=("csv", "json", "plain"), default=None)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"experiment seed (default {DEFAULT_SEED})")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="peerpressure", description="Solve and simulate the card game Peer Pressure.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="outcome of one position")
    p.add_argument("position", help="e.g. 1,2,4/3,5 or a JSON object")

    p = sub.add_parser("census", parents=[common], help="outcomes of all deals of n cards")
    p.add_argument("n", type=int)
    p.add_argument("--figure", type=Path, help="bar chart of outcome shares for 2..n")

    p = sub.add_parser("sweep", parents=[common], help="estimate rates over a grid of r and n")
    p.add_argument("--r", type=_ratio_list, default=[parse_ratio(1)], help="ratios, e.g. 1,3/2,17/10")
    p.add_argument("--n", type=_int_list, required=True, help="card counts, e.g. 8,12,16")
    p.add_argument("--model", choices=[k.value for k in DealKind], default="ui")
    p.add_argument("--mode", choices=[m.value for m in SweepMode], default="solver")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--k", type=int, default=5, help="intervals for certificate mode")
    p.add_argument("--exact", action="store_true", help="enumerate every deal (solver mode, unbiased models)")
    p.add_argument("--figure", type=Path, help="plot rate against n to this image file")

    p = sub.add_parser("certify", parents=[common], help="interval certificate for both defenders")
    p.add_argument("position")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("playout", parents=[common], help="referee a game between two policies")
    p.add_argument("position")
    p.add_argument("--alice", default="lowest", help=f"one of {', '.join(POLICIES)}")
    p.add_argument("--bob", default="lowest", help=f"one of {', '.join(POLICIES)}")

    sub.add_parser("bench", parents=[common], help="time and memory of a full table build")
    return parser


def _table(args: argparse.Namespace, needed: int) -> SolverTable:
    if not 1 <= args.mmax <= HARD_CAP:
        raise CapacityExceeded(f"--mmax must be within 1..{HARD_CAP}, got {args.mmax}")
    if needed > args.mmax:
        raise CapacityExceeded(f"{needed} live cards exceeds --mmax {args.mmax}")
    return load_or_build(args.table, max(needed, 1), args.workers)


def _emit(args: argparse.Namespace, plain: str, payload, default_format: str = "plain") -> None:
    fmt = args.format or (default_format if args.out else "plain")
    if fmt != "plain" and args.out is None:
        raise InvalidInput(f"--format {fmt} needs --out")
    if fmt == "plain":
        if args.out is not None:
            args.out.write_text(plain + "\n")
        else:
            print(plain)
        return
    if fmt == "json":
        args.out.write_text(json.dumps(payload, indent=2) + "\n")
        return
    raise InvalidInput(f"--format {fmt} is not available for {args.command}")


def _policy(name: str, pos: Position, player: Player, args: argparse.Namespace) -> Strategy:
    if name == "lowest":
        return lowest_strategy()
    if name == "highest":
        return highest_strategy()
    if name == "lemma":
        if verdict_for(pos, player) is LemmaVerdict.NONE:
            raise InvalidInput(f"lemma policy does not apply to {player.value} in {pos}")
        return LemmaStrategy()
    if name == "solver":
        return _table(args, pos.live_count).policy()
    if name.startswith("random:"):
        try:
            return random_strategy(int(name.split(":", 1)[1]))
        except ValueError:
            pass
    raise InvalidInput(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}")


def cmd_solve(args: argparse.Namespace) -> None:
    pos = Position.parse(args.position)
    if is_terminal(pos) is not None:
        result = Outcome.win_for(is_terminal(pos))
        _emit(args, result.value, {"position": pos.to_text(), "outcome": result.value})
        return
    table = _table(args, pos.live_count)
    result = table.outcome(pos)
    lines = [result.value]
    payload = {"position": pos.to_text(), "outcome": result.value}
    if result is not Outcome.DRAW:
        winner = Player.ALICE if result is Outcome.ALICE_WIN else Player.BOB
        moves = sorted(table.winning_moves(pos, winner))
        strategy = table.extract_strategy(pos, winner)
        report = best_response(pos, strategy, winner.opponent)
        policies = {winner: strategy, winner.opponent: table.policy()}
        transcript = play_out(pos, policies[Player.ALICE], policies[Player.BOB])
        lines.append(f"winning moves: {','.join(map(str, moves))}")
        lines.append(f"best response beats extracted strategy: {'yes' if report.beaten else 'no'}")
        lines.append(transcript.to_text())
        payload.update(
            winning_moves=moves,
            refuted=report.beaten,
            transcript=[[b.alice_played, b.bob_played, b.winner.value] for b in transcript.battles],
        )
    _emit(args, "\n".join(lines), payload)


def cmd_census(args: argparse.Namespace) -> None:
    table = _table(args, args.n)
    report = census(args.n, table)
    lines = [
        f"n={report.n} deals={report.total} alice={report.alice_win} bob={report.bob_win} draw={report.draw}",
        *(pos.to_text() for pos in report.draws),
    ]
    _emit(args, "\n".join(lines), report.to_json())
    if args.figure:
        from .plotting import plot_census

        plot_census([census(n, table) for n in range(2, args.n + 1)], args.figure)


def cmd_sweep(args: argparse.Namespace) -> None:
    mode = SweepMode(args.mode)
    table = _table(args, max(args.n)) if mode is SweepMode.SOLVER else None
    rows = sweep(args.r, args.n, DealKind(args.model), args.trials, args.seed, mode,
                 table=table, k=args.k, exact=args.exact)
    fmt = args.format or ("csv" if args.out else "plain")
    if fmt == "plain":
        width = max(len(h) for h in CSV_HEADER)
        print("  ".join(h.rjust(width) for h in CSV_HEADER))
        for row in rows:
            print("  ".join(str(v).rjust(width) for v in row.as_csv_row()))
    elif args.out is None:
        raise InvalidInput(f"--format {fmt} needs --out")
    elif fmt == "csv":
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        args.out.write_text(json.dumps([dict(zip(CSV_HEADER, r.as_csv_row())) for r in rows], indent=2) + "\n")
    if args.figure:
        from .plotting import plot_sweep

        plot_sweep(rows, args.figure, title=f"{args.mode}, model {args.model}")


def cmd_certify(args: argparse.Namespace) -> None:
    pos = Position.parse(args.position)
    payload = {
        "position": pos.to_text(),
        "bob_defends": certify(pos, args.k, Player.BOB).to_json(),
        "alice_defends": certify(pos, args.k, Player.ALICE).to_json(),
    }
    text = json.dumps(payload, indent=2)
    if args.out is not None:
        args.out.write_text(text + "\n")
    else:
        print(text)


def cmd_playout(args: argparse.Namespace) -> None:
    pos = Position.parse(args.position)
    alice = _policy(args.alice, pos, Player.ALICE, args)
    bob = _policy(args.bob, pos, Player.BOB, args)
    transcript = play_out(pos, alice, bob)
    payload = {
        "position": pos.to_text(),
        "alice": alice.name,
        "bob": bob.name,
        "battles": [[b.alice_played, b.bob_played, b.winner.value] for b in transcript.battles],
        "winner": transcript.final_winner.value,
    }
    _emit(args, transcript.to_text(), payload)


def cmd_bench(args: argparse.Namespace) -> None:
    if not 1 <= args.mmax <= HARD_CAP:
        raise CapacityExceeded(f"--mmax must be within 1..{HARD_CAP}")
    build_table(2)  # compile outside the timed region
    tracemalloc.start()
    started = time.perf_counter()
    table = build_table(args.mmax, args.workers)
    elapsed = time.perf_counter() - started
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    table_bytes = sum(table.wa_level(m).nbytes for m in range(1, table.m_max + 1))
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
    payload = {
        "mmax": args.mmax,
        "seconds": round(elapsed, 3),
        "peak_traced_bytes": peak,
        "table_bytes": table_bytes,
        "max_rss_bytes": rss,
    }
    plain = (
        f"mmax={args.mmax} build={elapsed:.2f}s table={table_bytes / 2**20:.1f} MiB "
        f"peak-alloc={peak / 2**20:.1f} MiB max-rss={rss / 2**20:.1f} MiB"
    )
    _emit(args, plain, payload)


COMMANDS = {
    "solve": cmd_solve,
    "census": cmd_census,
    "sweep": cmd_sweep,
    "certify": cmd_certify,
    "playout": cmd_playout,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except CapacityExceeded as exc:
        print(f"peerpressure: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except PeerPressureError as exc:
        print(f"peerpressure: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
