"""Command-line front end: solve, validate, prove, audit, count.

Exit codes are a stable contract: 0 accept/pass, 1 protocol reject or audit
failure, 2 input error, 3 unsatisfiable puzzle.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .audit import full_audit
from .cards import RandomSource
from .protocol import ProverInput, card_stats, run_protocol
from .puzzle import (
    PuzzleFormatError,
    max_room_size,
    parse_puzzle,
    parse_solution,
    solve,
    validate,
)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_INPUT = 2
EXIT_UNSAT = 3


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ripple-zkp",
        description="Simulate and audit the card-based zero-knowledge proof "
        "for Ripple Effect puzzles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--puzzle", required=True, help="puzzle file")
        return p

    p = add("solve", "find a solution by backtracking")
    p.add_argument("--out", help="write the solution here instead of stdout")

    p = add("validate", "check a solution against the rules")
    p.add_argument("--solution", required=True, help="solution file")

    p = add("prove", "run the card protocol and emit its transcript")
    p.add_argument("--solution", help="solution file")
    p.add_argument("--solve-first", action="store_true", help="solve, then prove that solution")
    p.add_argument("--seed", type=_seed, default=0, help="shuffle seed (default 0)")
    p.add_argument("--dedupe-directions", action="store_true",
                   help="check only right/down (covers each pair once)")
    p.add_argument("--out", help="write the transcript here instead of stdout")

    p = add("audit", "statistical zero-knowledge audit over many runs")
    p.add_argument("--trials", type=_positive_int, default=1000, help="runs per side (default 1000)")
    p.add_argument("--seed", type=_seed, default=0, help="base seed (default 0)")
    p.add_argument("--workers", type=_positive_int, default=1, help="parallel worker processes")
    p.add_argument("--dedupe-directions", action="store_true")
    p.add_argument("--out", help="write the report here instead of stdout")

    add("count", "report the protocol's card usage")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PuzzleFormatError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    puzzle = parse_puzzle(_read(args.puzzle))
    solutions = solve(puzzle, limit=1)
    if not solutions:
        print("unsatisfiable", file=sys.stderr)
        return EXIT_UNSAT
    _emit(solutions[0].to_text(), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    puzzle = parse_puzzle(_read(args.puzzle))
    assignment = parse_solution(_read(args.solution), puzzle)
    violations = validate(puzzle, assignment)
    for v in violations:
        cells = " ".join(f"({r},{c})" for r, c in v.cells)
        print(f"{v.kind} {cells}: {v.detail}")
    if violations:
        return EXIT_REJECT
    print("valid")
    return EXIT_OK


def cmd_prove(args) -> int:
    puzzle = parse_puzzle(_read(args.puzzle))
    if args.solve_first:
        solutions = solve(puzzle, limit=1)
        if not solutions:
            print("unsatisfiable", file=sys.stderr)
            return EXIT_UNSAT
        assignment = solutions[0]
    elif args.solution:
        assignment = parse_solution(_read(args.solution), puzzle)
    else:
        raise PuzzleFormatError("prove needs --solution or --solve-first")
    verdict, transcript, stats = run_protocol(
        puzzle,
        ProverInput(assignment, honest=False),
        RandomSource(args.seed),
        dedupe_directions=args.dedupe_directions,
    )
    _emit(transcript.serialize(), args.out)
    if verdict.accepted:
        print(f"accept cards={stats.total}", file=sys.stderr)
        return EXIT_OK
    print(f"reject reason={verdict.reason} loc={verdict.loc_text()}", file=sys.stderr)
    return EXIT_REJECT


def cmd_audit(args) -> int:
    puzzle = parse_puzzle(_read(args.puzzle))
    solutions = solve(puzzle, limit=1)
    if not solutions:
        print("unsatisfiable", file=sys.stderr)
        return EXIT_UNSAT
    report = full_audit(
        puzzle,
        solutions[0],
        trials=args.trials,
        base_seed=args.seed,
        dedupe_directions=args.dedupe_directions,
        workers=args.workers,
    )
    _emit(report.serialize(), args.out)
    return EXIT_OK if report.passed else EXIT_REJECT


def cmd_count(args) -> int:
    puzzle = parse_puzzle(_read(args.puzzle))
    stats = card_stats(puzzle)
    k = max_room_size(puzzle)
    print(
        f"k={k} m={puzzle.rows} n={puzzle.cols}"
        f" grid_cards={stats.grid_cards}"
        f" peak_aux_cards={stats.peak_aux_cards}"
        f" total={stats.total}"
    )
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "validate": cmd_validate,
    "prove": cmd_prove,
    "audit": cmd_audit,
    "count": cmd_count,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except PuzzleFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
