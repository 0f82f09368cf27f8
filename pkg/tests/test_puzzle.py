import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import all_room_partitions, brute_force_solutions, make_puzzle
from ripple_zkp.puzzle import (
    DISTANCE,
    FIXED_MISMATCH,
    ROOM_CONTENT,
    Assignment,
    PuzzleFormatError,
    max_room_size,
    parse_puzzle,
    parse_solution,
    solve,
    validate,
)

SAMPLE7X7_SOLUTION_ROWS = [
    [2, 1, 3, 1, 4, 2, 3],
    [1, 5, 2, 4, 1, 3, 1],
    [3, 4, 1, 2, 3, 5, 4],
    [1, 2, 4, 3, 5, 1, 2],
    [4, 3, 1, 5, 2, 4, 6],
    [5, 1, 2, 1, 4, 3, 5],
    [3, 2, 5, 4, 3, 2, 1],
]


class TestParse:
    def test_seven_by_seven_instance(self, sample7x7):
        assert sample7x7.rows == 7 and sample7x7.cols == 7
        assert sorted(sample7x7.fixed.values()) == [1, 2, 3, 4, 5, 6]
        assert sample7x7.fixed == {
            (7, 4): 4,
            (7, 7): 1,
            (5, 4): 5,
            (5, 7): 6,
            (3, 1): 3,
            (2, 3): 2,
        }
        sizes = sorted(len(c) for c in sample7x7.room_cells.values())
        assert sizes == [1, 1, 3, 4, 4, 5, 5, 5, 5, 5, 5, 6]

    def test_smallest_instance(self):
        puzzle = parse_puzzle("1 1\na\n.\n")
        assert puzzle.rows == puzzle.cols == 1
        assert puzzle.room_size("a") == 1
        assert puzzle.fixed == {}

    def test_disconnected_room_rejected(self):
        text = "2 2\nA B\nB A\n. .\n. .\n"
        with pytest.raises(PuzzleFormatError, match="not edge-connected"):
            parse_puzzle(text)

    def test_comments_and_blank_lines_ignored(self):
        text = "# a comment\n\n1 2\n\na a\n# another\n. 2\n"
        puzzle = parse_puzzle(text)
        assert puzzle.fixed == {(1, 2): 2}

    def test_ragged_grid_rejected(self):
        with pytest.raises(PuzzleFormatError, match="ragged"):
            parse_puzzle("2 2\na a\na\n. .\n. .\n")

    def test_fixed_value_beyond_room_size_rejected(self):
        with pytest.raises(PuzzleFormatError, match="exceeds room size"):
            parse_puzzle("1 2\na a\n3 .\n")

    def test_fixed_value_not_positive_rejected(self):
        with pytest.raises(PuzzleFormatError, match="positive"):
            parse_puzzle("1 2\na a\n0 .\n")

    def test_bad_header(self):
        with pytest.raises(PuzzleFormatError):
            parse_puzzle("seven seven\na\n.\n")

    def test_missing_lines(self):
        with pytest.raises(PuzzleFormatError, match="content lines"):
            parse_puzzle("2 2\na a\na a\n. .\n")

    def test_line_number_in_error(self):
        err = None
        try:
            parse_puzzle("2 2\na a\na a a\n. .\n. .\n")
        except PuzzleFormatError as exc:
            err = str(exc)
        assert err is not None and "line 3" in err


class TestParseSolution:
    def test_roundtrip(self, sample7x7, sample7x7_solution):
        assert sample7x7_solution.values == tuple(tuple(r) for r in SAMPLE7X7_SOLUTION_ROWS)
        again = parse_solution(sample7x7_solution.to_text(), sample7x7)
        assert again == sample7x7_solution

    def test_wrong_shape(self, sample7x7):
        with pytest.raises(PuzzleFormatError):
            parse_solution("1 2 3\n", sample7x7)

    def test_nonpositive_rejected(self, sample7x7):
        bad = "\n".join("1 1 1 1 1 1 1" for _ in range(6)) + "\n0 1 1 1 1 1 1\n"
        with pytest.raises(PuzzleFormatError, match="positive"):
            parse_solution(bad, sample7x7)


class TestValidate:
    def test_printed_solution_is_valid(self, sample7x7, sample7x7_solution):
        assert validate(sample7x7, sample7x7_solution) == []

    def test_adjacent_duplicate_ones(self, sample7x7, sample7x7_solution):
        broken = sample7x7_solution.with_value((1, 1), 1)
        kinds = {v.kind for v in validate(sample7x7, broken)}
        assert DISTANCE in kinds
        distance = [v for v in validate(sample7x7, broken) if v.kind == DISTANCE]
        assert any(set(v.cells) == {(1, 1), (1, 2)} for v in distance)

    def test_single_cell(self):
        puzzle = make_puzzle(["a"])
        assert validate(puzzle, Assignment.from_rows([[1]])) == []

    def test_room_content_violation(self):
        puzzle = make_puzzle(["a a"])
        out = validate(puzzle, Assignment.from_rows([[1, 1]]))
        assert any(v.kind == ROOM_CONTENT for v in out)

    def test_fixed_mismatch(self):
        puzzle = make_puzzle(["a a"], fixed={(1, 1): 2})
        out = validate(puzzle, Assignment.from_rows([[1, 2]]))
        assert [v.kind for v in out if v.kind == FIXED_MISMATCH] == [FIXED_MISMATCH]

    def test_distance_needs_x_cells_between(self):
        # Two 2s with one cell between: too close. Two cells between: fine.
        puzzle = make_puzzle(["a a b b c"])
        too_close = Assignment.from_rows([[2, 1, 2, 1, 1]])
        dist = [v for v in validate(puzzle, too_close) if v.kind == DISTANCE]
        assert any(set(v.cells) == {(1, 1), (1, 3)} for v in dist)
        spaced = Assignment.from_rows([[2, 1, 3, 2, 1]])
        dist = [v for v in validate(puzzle, spaced) if v.kind == DISTANCE]
        assert dist == []

    def test_column_distance(self):
        puzzle = make_puzzle(["a", "a", "b"])
        # Separation 1 >= 1 is legal for two 1s; 1 < 2 is not for two 2s.
        legal = Assignment.from_rows([[1], [2], [1]])
        assert [v for v in validate(puzzle, legal) if v.kind == DISTANCE] == []
        broken = Assignment.from_rows([[2], [1], [2]])
        dist = [v for v in validate(puzzle, broken) if v.kind == DISTANCE]
        assert len(dist) == 1 and set(dist[0].cells) == {(1, 1), (3, 1)}

    def test_pairs_reported_once(self):
        # Oracle: direct enumeration over all unordered same-line pairs.
        puzzle = make_puzzle(["a a b b"])
        asg = Assignment.from_rows([[1, 1, 1, 1]])
        got = sorted(
            tuple(sorted(v.cells)) for v in validate(puzzle, asg) if v.kind == DISTANCE
        )
        expected = []
        cells = puzzle.cells
        for i, c1 in enumerate(cells):
            for c2 in cells[i + 1:]:
                same_row = c1[0] == c2[0]
                same_col = c1[1] == c2[1]
                if not (same_row or same_col):
                    continue
                gap = abs(c2[0] - c1[0]) + abs(c2[1] - c1[1]) - 1
                if asg[c1] == asg[c2] and gap < asg[c1]:
                    expected.append(tuple(sorted((c1, c2))))
        assert got == sorted(expected)

    @given(st.integers(0, 3**6 - 1))
    @settings(max_examples=60, deadline=None)
    def test_distance_matches_pair_enumeration(self, encoded):
        # Random 2x3 tables vs the direct all-pairs oracle.
        values = []
        for _ in range(6):
            values.append(encoded % 3 + 1)
            encoded //= 3
        puzzle = make_puzzle(["a a a", "a a a"])
        asg = Assignment.from_rows([values[:3], values[3:]])
        got = sorted(
            tuple(sorted(v.cells)) for v in validate(puzzle, asg) if v.kind == DISTANCE
        )
        expected = []
        cells = puzzle.cells
        for i, c1 in enumerate(cells):
            for c2 in cells[i + 1:]:
                if c1[0] != c2[0] and c1[1] != c2[1]:
                    continue
                gap = abs(c2[0] - c1[0]) + abs(c2[1] - c1[1]) - 1
                if asg[c1] == asg[c2] and gap < asg[c1]:
                    expected.append(tuple(sorted((c1, c2))))
        assert got == sorted(expected)


class TestSolve:
    def test_finds_printed_solution(self, sample7x7, sample7x7_solution):
        assert solve(sample7x7, limit=1) == [sample7x7_solution]

    def test_solution_is_unique(self, sample7x7, sample7x7_solution):
        assert solve(sample7x7, limit=2) == [sample7x7_solution]

    def test_single_cell(self):
        puzzle = make_puzzle(["a"])
        assert [a.values for a in solve(puzzle, limit=10)] == [((1,),)]

    def test_domino_room_both_orders(self):
        puzzle = make_puzzle(["a a"])
        got = [a.values for a in solve(puzzle, limit=10)]
        assert got == [((1, 2),), ((2, 1),)]

    def test_unsatisfiable(self):
        # Two fixed 1s in one domino room can never read 1..2.
        puzzle = make_puzzle(["a a"], fixed={(1, 1): 1, (1, 2): 1})
        assert solve(puzzle, limit=5) == []

    def test_limit_validation(self):
        with pytest.raises(ValueError):
            solve(make_puzzle(["a"]), limit=0)

    @pytest.mark.parametrize(
        "room_rows",
        [
            ["a a", "a a"],
            ["a a", "b b"],
            ["a b", "a b"],
            ["a a a", "b b a"],
            ["a a b b", "c c d d"],
            ["a b b", "a c c", "a d d"],
        ],
    )
    def test_exhaustive_against_brute_force(self, room_rows):
        puzzle = make_puzzle(room_rows)
        assert [a.values for a in solve(puzzle, limit=None)] == [
            a.values for a in brute_force_solutions(puzzle)
        ]

    def test_solutions_validate_clean(self):
        for puzzle in all_room_partitions(2, 2):
            for asg in solve(puzzle, limit=None):
                assert validate(puzzle, asg) == []

    def test_values_bounded_by_room_size(self, sample7x7, sample7x7_solution):
        # Rule-1 consequence: a clean grid never exceeds its room's size.
        assert validate(sample7x7, sample7x7_solution) == []
        for cell in sample7x7.cells:
            assert sample7x7_solution[cell] <= sample7x7.room_size(sample7x7.room_of[cell])


class TestMaxRoomSize:
    def test_seven_by_seven(self, sample7x7):
        assert max_room_size(sample7x7) == 6

    def test_single_cell(self):
        assert max_room_size(make_puzzle(["a"])) == 1

    def test_one_room_grid(self):
        assert max_room_size(make_puzzle(["a a a", "a a a"])) == 6
