"""Card-based zero-knowledge proof simulator for the Ripple Effect puzzle."""

from .cards import (
    CLUB,
    HEART,
    HiddenLog,
    MalformedCommitmentError,
    Matrix,
    RandomSource,
    Transcript,
    decode,
    encode,
    pile_scramble_shuffle,
    pile_shift_shuffle,
    rearrangement,
)
from .protocol import (
    AuditTrail,
    Board,
    CardStats,
    ProtocolResult,
    ProverInput,
    Verdict,
    card_stats,
    run_protocol,
    setup,
    uniqueness_verify,
    verify_distance_direction,
    verify_distance_phase,
    verify_room,
)
from .audit import (
    AuditReport,
    RevealFamily,
    SweepReport,
    full_audit,
    indistinguishability_audit,
    simulate_transcript,
    soundness_sweep,
    uniformity_audit,
)
from .puzzle import (
    Assignment,
    Puzzle,
    PuzzleFormatError,
    Violation,
    max_room_size,
    parse_puzzle,
    parse_solution,
    solve,
    validate,
)

__all__ = [
    "CLUB",
    "HEART",
    "Assignment",
    "AuditReport",
    "AuditTrail",
    "Board",
    "CardStats",
    "HiddenLog",
    "MalformedCommitmentError",
    "Matrix",
    "ProtocolResult",
    "ProverInput",
    "Puzzle",
    "PuzzleFormatError",
    "RandomSource",
    "RevealFamily",
    "SweepReport",
    "Transcript",
    "Verdict",
    "Violation",
    "card_stats",
    "decode",
    "encode",
    "full_audit",
    "indistinguishability_audit",
    "max_room_size",
    "parse_puzzle",
    "parse_solution",
    "pile_scramble_shuffle",
    "pile_shift_shuffle",
    "rearrangement",
    "run_protocol",
    "setup",
    "simulate_transcript",
    "solve",
    "soundness_sweep",
    "uniformity_audit",
    "uniqueness_verify",
    "validate",
    "verify_distance_direction",
    "verify_distance_phase",
    "verify_room",
]
