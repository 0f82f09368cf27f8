"""The card protocol: commitments, distance phase, room phase, accounting.

A board commits one length-k sequence per grid cell (k = biggest room
size); fixed cells are placed publicly from the clues, empty cells secretly
from the prover's claimed solution. Verification then runs two phases:

* distance phase: for every cell and each of the four directions, prove
  that the cell's value x does not reappear within the first x cells that
  way, without revealing x. The check inserts k-1 blank columns after the
  x-th neighbour under cover of shuffles, selects the k sequences starting
  at the first neighbour (exactly the x real neighbours plus blanks), and
  runs the uniqueness subprotocol against the cell's own sequence.
* room phase: per room, scramble the room's sequences and reveal them all;
  they must read as a permutation of 1..size.

Honest runs always accept; any committed grid violating a rule is always
rejected; every revealed heart position is uniform thanks to a fresh
shuffle before each reveal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .cards import (
    CLUB,
    HEART,
    HiddenLog,
    MalformedCommitmentError,
    Matrix,
    RandomSource,
    Sequence,
    Transcript,
    decode,
    encode,
    pile_scramble_shuffle,
    pile_shift_shuffle,
    rearrangement,
)
from .puzzle import (
    DIRECTION_STEPS,
    DIRECTIONS,
    Assignment,
    Cell,
    Puzzle,
    RoomId,
    max_room_size,
    validate,
)

DISTANCE_HEART_FOUND = "DistanceHeartFound"
ROOM_MULTISET_MISMATCH = "RoomMultisetMismatch"
MALFORMED_COMMITMENT = "MalformedCommitment"


@dataclass(frozen=True)
class Verdict:
    """Protocol outcome; a reject names the reason and where it happened."""

    accepted: bool
    reason: str | None = None
    location: tuple | str | None = None

    @property
    def outcome(self) -> str:
        return "accept" if self.accepted else "reject"

    def loc_text(self) -> str | None:
        if self.location is None:
            return None
        if isinstance(self.location, str):
            return self.location
        cell, direction = self.location
        return f"({cell[0]},{cell[1]}):{direction}"


ACCEPT = Verdict(True)


@dataclass(frozen=True)
class CardStats:
    """Deck usage: cards on the grid plus the auxiliary peak beside it."""

    grid_cards: int
    peak_aux_cards: int

    @property
    def total(self) -> int:
        return self.grid_cards + self.peak_aux_cards


@dataclass(frozen=True)
class ProverInput:
    """The claimed solution; honest provers are checked against the rules."""

    assignment: Assignment
    honest: bool = True


@dataclass
class Board:
    """Face-down commitments on the grid plus auxiliary card accounting."""

    puzzle: Puzzle
    k: int
    cell_seq: dict[Cell, Sequence]
    aux_live: int = 0
    aux_peak: int = 0

    def aux_alloc(self, n: int) -> None:
        self.aux_live += n
        if self.aux_live > self.aux_peak:
            self.aux_peak = self.aux_live

    def aux_free(self, n: int) -> None:
        self.aux_live -= n


class AuditTrail:
    """Private instrumentation: hidden draws plus mid-protocol snapshots.

    Lets tests assert what the transcript must hide: that the column
    reaching the rightmost slot really is the x-th neighbour, that the
    selected sequences are exactly the first x neighbours plus blanks, and
    that every sequence returns to its cell unchanged.
    """

    def __init__(self):
        self.hidden = HiddenLog()
        self.records: list[tuple] = []

    def record(self, kind: str, *data) -> None:
        self.records.append((kind, *data))

    def of_kind(self, kind: str) -> list[tuple]:
        return [rec for rec in self.records if rec[0] == kind]


class ProtocolResult(NamedTuple):
    verdict: Verdict
    transcript: Transcript
    stats: CardStats


def setup(puzzle: Puzzle, prover: ProverInput) -> Board:
    """Commit one length-k sequence per cell.

    Fixed cells take the puzzle's clue value no matter what the prover
    claims (their placement is public); other cells take the prover's
    value. Values outside 0..k cannot be encoded and fail immediately.
    """
    if prover.honest and validate(puzzle, prover.assignment):
        raise ValueError("honest prover requires a rule-satisfying assignment")
    k = max_room_size(puzzle)
    cell_seq: dict[Cell, Sequence] = {}
    for cell in puzzle.cells:
        value = puzzle.fixed.get(cell)
        if value is None:
            value = prover.assignment[cell]
        if not 0 <= value <= k:
            raise MalformedCommitmentError(
                f"value {value} at cell {cell} cannot be encoded with {k} cards",
                matrix_id=None,
                row=None,
            )
        cell_seq[cell] = encode(value, k)
    return Board(puzzle=puzzle, k=k, cell_seq=cell_seq)


def _single_heart(faces: tuple, matrix_id: str, row: int) -> int:
    """1-based heart position, or raise when the count is not exactly one."""
    count = faces.count(HEART)
    if count != 1:
        raise MalformedCommitmentError(
            f"matrix {matrix_id} row {row}: expected exactly one heart, saw {count}",
            matrix_id=matrix_id,
            row=row,
        )
    return faces.index(HEART) + 1


def _uniqueness_on_matrix(
    matrix: Matrix,
    rng: RandomSource,
    transcript: Transcript,
    hidden: HiddenLog | None,
) -> bool:
    """Steps 2-5 of the uniqueness subprotocol on an already-built matrix.

    Row 2 holds the reference sequence; rows 3 and below hold the sequences
    that must not repeat its number. Returns True when the column under the
    reference heart shows no heart below Row 2.
    """
    pile_shift_shuffle(matrix, rng, hidden)
    transcript.mark(f"unique:{matrix.id}", "enter")
    faces = matrix.reveal_row(2, transcript)
    j = _single_heart(faces, matrix.id, 2)
    segment = matrix.reveal_segment(j, 3, matrix.n_rows, transcript)
    ok = HEART not in segment
    if ok:
        matrix.flip_down()
    transcript.mark(f"unique:{matrix.id}", "exit")
    return ok


def uniqueness_verify(
    s0: Sequence,
    others: list[Sequence],
    rng: RandomSource,
    transcript: Transcript,
    audit: AuditTrail | None = None,
) -> Verdict:
    """Verify that no sequence in ``others`` encodes the same number as ``s0``.

    Builds the subprotocol matrix (an indicator row, then s0, then the
    others), shuffles, and inspects the column under s0's heart. The matrix
    is left shuffled; inside the main protocol the caller realigns it.
    """
    b = len(s0)
    hidden = audit.hidden if audit else None
    matrix = Matrix.from_rows("U", [encode(1, b), list(s0), *[list(s) for s in others]])
    try:
        ok = _uniqueness_on_matrix(matrix, rng, transcript, hidden)
    except MalformedCommitmentError:
        return Verdict(False, MALFORMED_COMMITMENT)
    if not ok:
        return Verdict(False, DISTANCE_HEART_FOUND)
    return ACCEPT


def verify_distance_direction(
    board: Board,
    cell: Cell,
    direction: str,
    rng: RandomSource,
    transcript: Transcript,
    audit: AuditTrail | None = None,
) -> Verdict:
    """One distance check: cell's value x must not recur within x steps that way.

    Runs the full sixteen-step procedure; on accept every sequence is back
    on its cell, still face-down, and all auxiliary cards are retired.
    """
    try:
        return _distance_direction(board, cell, direction, rng, transcript, audit)
    except MalformedCommitmentError:
        return Verdict(False, MALFORMED_COMMITMENT, (cell, direction))


def _distance_direction(
    board: Board,
    cell: Cell,
    direction: str,
    rng: RandomSource,
    transcript: Transcript,
    audit: AuditTrail | None,
) -> Verdict:
    puzzle = board.puzzle
    k = board.k
    hidden = audit.hidden if audit else None
    loc = (cell, direction)
    transcript.mark(f"dist:{cell[0]},{cell[1]}:{direction}", "enter")

    # Gather the cell's sequence and its k neighbours that way, padding
    # with public all-club sequences where the grid ends.
    a0 = board.cell_seq.pop(cell)
    dr, dc = DIRECTION_STEPS[direction]
    neighbours: list[Sequence] = []
    grid_cells: list[Cell] = []
    pad_count = 0
    for i in range(1, k + 1):
        ncell = (cell[0] + dr * i, cell[1] + dc * i)
        if puzzle.in_bounds(ncell):
            neighbours.append(board.cell_seq.pop(ncell))
            grid_cells.append(ncell)
        else:
            neighbours.append([CLUB] * k)
            pad_count += 1
    board.aux_alloc(3 * k + pad_count * k)

    if audit:
        before_values = tuple(decode(s) for s in [a0, *neighbours])

    # Step 1: k columns of [indicator, a0, indicator, blank, neighbour pile].
    row1 = encode(1, k)
    row3 = encode(1, k)
    row4 = encode(0, k)
    m = Matrix(
        "M",
        [[row1[j], a0[j], row3[j], row4[j], *neighbours[j]] for j in range(k)],
    )

    # Steps 2-4: shuffle, find a0's heart, park its column at the right edge.
    pile_shift_shuffle(m, rng, hidden)
    faces = m.reveal_row(2, transcript)
    j1 = _single_heart(faces, "M", 2)
    m.flip_down()
    m.shift(k - j1, transcript)

    if audit:
        x = decode(a0)
        audit.record(
            "align_rightmost",
            cell,
            direction,
            x,
            tuple(neighbours[x - 1]),
            tuple(m.cols[k - 1][4:]),
        )

    # Steps 5-6: split off the top two rows and realign them on their own.
    m1, m2 = m.split_rows(2, "M1", "M2")
    rearrangement(m1, rng, transcript, hidden)

    # Step 7: append k-1 blank columns behind a fresh indicator pair.
    if k > 1:
        tail0 = encode(0, k - 1)
        tail1 = encode(1, k - 1)
        appended = [[tail0[j], tail1[j], *[CLUB] * k] for j in range(k - 1)]
        m2.append_columns([list(col) for col in appended])
        board.aux_alloc((k - 1) * (k + 2))
    else:
        appended = []

    # Steps 8-9: shuffle, find the first neighbour's column.
    pile_shift_shuffle(m2, rng, hidden)
    faces = m2.reveal_row(1, transcript)
    j2 = _single_heart(faces, "M2", 1)
    m2.flip_down()

    # Step 10: select the k consecutive piles starting there.
    width = m2.n_cols
    s_col = [(j2 - 1 + i) % width + 1 for i in range(k)]
    selected = [m2.take_segment(c, 3, k + 2) for c in s_col]

    if audit:
        expected = [tuple(neighbours[i]) for i in range(x)] + [
            (CLUB,) * k for _ in range(k - x)
        ]
        audit.record("selection", cell, direction, x, expected, [tuple(s) for s in selected])

    # Steps 10-11: stack them under the cell's own sequence and check
    # none repeats its number.
    n = Matrix.from_rows("N", [m1.take_row(1), m1.take_row(2), *selected])
    if not _uniqueness_on_matrix(n, rng, transcript, hidden):
        transcript.mark(f"dist:{cell[0]},{cell[1]}:{direction}", "exit")
        return Verdict(False, DISTANCE_HEART_FOUND, loc)

    # Step 12: realign, return a0 to its cell and the piles to the matrix.
    rearrangement(n, rng, transcript, hidden)
    board.cell_seq[cell] = n.take_row(2)
    for idx, c in enumerate(s_col):
        m2.put_segment(c, 3, n.take_row(3 + idx))

    # Steps 13-15: hide the seam again, then cut the appended columns off.
    if k > 1:
        pile_shift_shuffle(m2, rng, hidden)
        faces = m2.reveal_row(2, transcript)
        j3 = _single_heart(faces, "M2", 2)
        m2.flip_down()
        m2.shift(k + 1 - j3, transcript)
        removed = m2.remove_columns(k + 1, 2 * k - 1)
        board.aux_free((k - 1) * (k + 2))
        if audit:
            audit.record("removed_block", cell, direction, appended, removed)

    # Step 16: realign and put every neighbour back where it came from.
    rearrangement(m2, rng, transcript, hidden)
    for i, ncell in enumerate(grid_cells):
        board.cell_seq[ncell] = m2.cols[i][2:]

    if audit:
        after_values = tuple(
            decode(board.cell_seq[c]) for c in [cell, *grid_cells]
        ) + tuple(decode(m2.cols[i][2:]) for i in range(len(grid_cells), k))
        audit.record("restore", cell, direction, before_values, after_values)

    board.aux_free(3 * k + pad_count * k)
    transcript.mark(f"dist:{cell[0]},{cell[1]}:{direction}", "exit")
    return ACCEPT


def verify_distance_phase(
    board: Board,
    rng: RandomSource,
    transcript: Transcript,
    audit: AuditTrail | None = None,
    dedupe_directions: bool = False,
) -> Verdict:
    """Distance checks for every cell and direction, stopping at the first failure.

    Cells go row-major; directions right, left, up, down. With
    ``dedupe_directions`` only right and down run, which still covers every
    pair once since the rule is symmetric.
    """
    directions = ("right", "down") if dedupe_directions else DIRECTIONS
    transcript.mark("distance_phase", "enter")
    for cell in board.puzzle.cells:
        for direction in directions:
            verdict = verify_distance_direction(
                board, cell, direction, rng, transcript, audit
            )
            if not verdict.accepted:
                return verdict
    transcript.mark("distance_phase", "exit")
    return ACCEPT


def verify_room(
    board: Board,
    room: RoomId,
    rng: RandomSource,
    transcript: Transcript,
    audit: AuditTrail | None = None,
) -> Verdict:
    """Scramble the room's piles and reveal them; they must read 1..size.

    The revealed cards are consumed: the room phase ends the protocol, so
    nothing returns to the grid.
    """
    hidden = audit.hidden if audit else None
    cells = board.puzzle.room_cells[room]
    transcript.mark(f"room:{room}", "enter")
    matrix = Matrix(f"R:{room}", [board.cell_seq.pop(c) for c in cells])
    pile_scramble_shuffle(matrix, rng, hidden)
    revealed = matrix.reveal_all(transcript)
    values = [decode(col) for col in revealed]
    if any(v is None for v in values):
        return Verdict(False, MALFORMED_COMMITMENT, room)
    if sorted(values) != list(range(1, len(cells) + 1)):
        return Verdict(False, ROOM_MULTISET_MISMATCH, room)
    transcript.mark(f"room:{room}", "exit")
    return ACCEPT


def run_protocol(
    puzzle: Puzzle,
    prover: ProverInput,
    rng: RandomSource,
    dedupe_directions: bool = False,
    audit: AuditTrail | None = None,
) -> ProtocolResult:
    """Full run: setup, distance phase, then room phase over every room."""
    transcript = Transcript()
    k = max_room_size(puzzle)
    grid_cards = k * puzzle.rows * puzzle.cols
    try:
        board = setup(puzzle, prover)
    except MalformedCommitmentError:
        verdict = Verdict(False, MALFORMED_COMMITMENT, "setup")
        transcript.verdict(verdict.outcome, verdict.reason, verdict.loc_text())
        return ProtocolResult(verdict, transcript, CardStats(grid_cards, 0))

    verdict = verify_distance_phase(board, rng, transcript, audit, dedupe_directions)
    if verdict.accepted:
        transcript.mark("room_phase", "enter")
        for room in board.puzzle.room_cells:
            verdict = verify_room(board, room, rng, transcript, audit)
            if not verdict.accepted:
                break
        else:
            transcript.mark("room_phase", "exit")

    transcript.verdict(verdict.outcome, verdict.reason, verdict.loc_text())
    return ProtocolResult(verdict, transcript, CardStats(grid_cards, board.aux_peak))


def card_stats(puzzle: Puzzle) -> CardStats:
    """Closed-form deck size: k per cell plus the auxiliary peak.

    The auxiliary peak is 3k for the three public rows of the distance
    matrix, (k-1)(k+2) for the appended blank block, and k*k for the
    padding sequences of a fully off-grid direction; all three coexist
    whenever an edge cell is checked outward.
    """
    k = max_room_size(puzzle)
    return CardStats(
        grid_cards=k * puzzle.rows * puzzle.cols,
        peak_aux_cards=2 * k * k + 4 * k - 2,
    )
