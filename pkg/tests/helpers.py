"""Shared test machinery: tiny-puzzle builders and brute-force oracles."""
from itertools import product

from ripple_zkp.puzzle import Assignment, Puzzle, validate


def make_puzzle(room_rows, fixed=None) -> Puzzle:
    """Puzzle from a list of room-label rows, e.g. ["a a", "b a"]."""
    rows = [r.split() for r in room_rows]
    m, n = len(rows), len(rows[0])
    room_of = {(r + 1, c + 1): rows[r][c] for r in range(m) for c in range(n)}
    return Puzzle(rows=m, cols=n, room_of=room_of, fixed=dict(fixed or {}))


def all_assignments(puzzle: Puzzle, max_value: int):
    """Every value table over 1..max_value, row-major cell order."""
    cells = puzzle.cells
    for combo in product(range(1, max_value + 1), repeat=len(cells)):
        values = {cell: v for cell, v in zip(cells, combo)}
        yield Assignment.from_rows(
            [
                [values[(r, c)] for c in range(1, puzzle.cols + 1)]
                for r in range(1, puzzle.rows + 1)
            ]
        )


def brute_force_solutions(puzzle: Puzzle) -> list[Assignment]:
    """All solutions by raw enumeration + validate; the solver's oracle.

    Values above a cell's room size always break the room rule, so the
    enumeration can stop at the room size without losing completeness.
    """
    cells = puzzle.cells
    ranges = [
        range(1, puzzle.room_size(puzzle.room_of[cell]) + 1) for cell in cells
    ]
    out = []
    for combo in product(*ranges):
        values = {cell: v for cell, v in zip(cells, combo)}
        asg = Assignment.from_rows(
            [
                [values[(r, c)] for c in range(1, puzzle.cols + 1)]
                for r in range(1, puzzle.rows + 1)
            ]
        )
        if not validate(puzzle, asg):
            out.append(asg)
    return out


def all_room_partitions(rows: int, cols: int) -> list[Puzzle]:
    """Every partition of the grid into edge-connected rooms."""
    cells = [(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]

    def connected(block: frozenset) -> bool:
        block = set(block)
        start = next(iter(block))
        seen = {start}
        stack = [start]
        while stack:
            r, c = stack.pop()
            for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if nb in block and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(block)

    partitions: list[list[frozenset]] = [[]]
    for cell in cells:
        grown: list[list[frozenset]] = []
        for part in partitions:
            for i, block in enumerate(part):
                grown.append(part[:i] + [block | {cell}] + part[i + 1:])
            grown.append(part + [frozenset({cell})])
        partitions = grown

    puzzles = []
    for part in partitions:
        if not all(connected(block) for block in part):
            continue
        room_of = {}
        for idx, block in enumerate(sorted(part, key=min)):
            for cell in block:
                room_of[cell] = f"r{idx}"
        puzzles.append(Puzzle(rows=rows, cols=cols, room_of=room_of, fixed={}))
    return puzzles
