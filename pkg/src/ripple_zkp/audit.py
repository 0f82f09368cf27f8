"""Executable security checks: completeness, soundness, and leak audits.

The protocol's security claims become statistics over transcripts:

* every reveal with a heart in it happens right after a fresh shuffle, so
  the heart's position must be uniform over the matrix width — checked per
  reveal family with a chi-squared goodness-of-fit test;
* a simulator that never sees the solution emits transcripts with the same
  event skeleton and the same reveal distributions — checked with total
  variation distance between real and simulated histograms;
* mutating a committed solution in any rule-breaking way must flip the
  verdict to reject — swept exhaustively over single-cell mutations.

A reveal family groups the same reveal step across all direction checks of
a run (the value-row heart, the three realignments, the two seam reveals, the
uniqueness pair) plus one family per room column slot: a room reveal is a
uniform permutation, so the heart position in each column slot is uniform
over the room's size, and those per-slot marginals are what the statistics
run on (full-permutation histograms would drown the TVD threshold in
sampling noise at any workable trial count). Each room reveal must still
be a permutation of 1..size outright; anything else is schema drift.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from multiprocessing import get_context

from scipy.stats import chi2

from .cards import HEART, RandomSource, Transcript, decode, encode
from .protocol import ProverInput, run_protocol
from .puzzle import Assignment, Puzzle, max_room_size, validate


class AuditError(Exception):
    """Transcript shape drifted from the protocol schema."""


# Below this many transcripts the p-values and TVDs are reported but do not
# gate the verdict; only structural failures (skeleton drift, a heart in an
# accept-path segment, a missing family) can fail an under-powered audit.
UNDERPOWERED_TRIALS = 1000


@dataclass(frozen=True)
class RevealFamily:
    """One reveal step pooled across a run; domain is the observation space."""

    key: str
    kind: str  # "heart" | "segment" | "room"
    domain: int


@dataclass(frozen=True)
class FamilyResult:
    family: RevealFamily
    observations: int
    chi_squared: float | None
    p_value: float | None
    tvd: float | None
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class AuditReport:
    """Per-family verdicts plus overall pass/fail and any caveats."""

    trials: int
    families: tuple[FamilyResult, ...]
    passed: bool
    warnings: tuple[str, ...] = ()

    def serialize(self) -> str:
        lines = [f"audit_report trials={self.trials} passed={_yn(self.passed)}"]
        for w in self.warnings:
            lines.append(f"warning {w}")
        for fr in self.families:
            lines.append(
                f"family key={fr.family.key} kind={fr.family.kind}"
                f" domain={fr.family.domain} n={fr.observations}"
                f" chi2={_num(fr.chi_squared)} p={_num(fr.p_value)}"
                f" tvd={_num(fr.tvd)} pass={_yn(fr.passed)}"
                + (f" note={fr.note}" if fr.note else "")
            )
        return "\n".join(lines) + "\n"


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _num(v: float | None) -> str:
    return "na" if v is None else f"{v:.6g}"


_REARR_KEYS = {"M1": "dist.rearr_m1", "N": "dist.rearr_n", "M2": "dist.rearr_m2"}


class FamilyCounts:
    """Streaming per-family histograms over many transcripts."""

    def __init__(self):
        self.trials = 0
        self.counts: dict[str, Counter] = {}
        self.widths: dict[str, int] = {}
        self.kinds: dict[str, str] = {}
        self.per_transcript: dict[str, int] | None = None
        self.first_skeleton: str | None = None

    def families(self) -> list[RevealFamily]:
        out = []
        for key in self.counts:
            kind = self.kinds[key]
            domain = 1 if kind == "segment" else self.widths[key]
            out.append(RevealFamily(key, kind, domain))
        return out

    def add(self, transcript: Transcript) -> None:
        seen: dict[str, int] = {}
        rearr_of: str | None = None
        unique_of: str | None = None
        for ev in transcript.events:
            tag = ev[0]
            if tag == "mark":
                name, kind = ev[1], ev[2]
                if name.startswith("rearr:"):
                    rearr_of = name[6:] if kind == "enter" else None
                elif name.startswith("unique:"):
                    unique_of = name[7:] if kind == "enter" else None
                continue
            if tag == "shift" or tag == "verdict":
                continue
            if tag == "reveal_row":
                mid, row, faces = ev[1], ev[2], ev[3]
                if rearr_of == mid:
                    key = _REARR_KEYS.get(mid, f"rearr.{mid}")
                elif unique_of == mid:
                    key = "dist.unique_s0" if mid == "N" else f"unique.{mid}.s0"
                elif mid == "M" and row == 2:
                    key = "dist.j1"
                elif mid == "M2" and row == 1:
                    key = "dist.j2"
                elif mid == "M2" and row == 2:
                    key = "dist.j3"
                else:
                    raise AuditError(f"unclassifiable reveal: m={mid} row={row}")
                if faces.count(HEART) != 1:
                    raise AuditError(f"family {key}: reveal without a single heart")
                self._observe(key, "heart", len(faces), faces.index(HEART) + 1, seen)
            elif tag == "reveal_segment":
                mid = ev[1]
                if unique_of != mid:
                    raise AuditError(f"segment reveal outside uniqueness: m={mid}")
                key = "dist.unique_seg" if mid == "N" else f"unique.{mid}.seg"
                faces = ev[5]
                self._observe(key, "segment", len(faces), faces.count(HEART), seen)
            elif tag == "reveal_all":
                mid, cols = ev[1], ev[2]
                if not mid.startswith("R:"):
                    raise AuditError(f"full reveal outside room phase: m={mid}")
                room = mid[2:]
                size = len(cols)
                values = [decode(col) for col in cols]
                if sorted(v for v in values if v is not None) != list(range(1, size + 1)):
                    raise AuditError(
                        f"room {room}: accept-path reveal is not a permutation of 1..{size}"
                    )
                for slot, value in enumerate(values, start=1):
                    self._observe(f"room.{room}.c{slot}", "room", size, value, seen)
            else:
                raise AuditError(f"unknown event type {tag!r}")
        if self.per_transcript is None:
            self.per_transcript = seen
            self.first_skeleton = transcript.skeleton()
        elif seen != self.per_transcript:
            raise AuditError("transcript event skeleton drifted between trials")
        self.trials += 1

    def _observe(self, key: str, kind: str, width: int, obs, seen: dict) -> None:
        counter = self.counts.get(key)
        if counter is None:
            self.counts[key] = counter = Counter()
            self.widths[key] = width
            self.kinds[key] = kind
        elif self.widths[key] != width:
            raise AuditError(f"family {key}: width changed {self.widths[key]} -> {width}")
        counter[obs] += 1
        seen[key] = seen.get(key, 0) + 1

    def merge(self, other: "FamilyCounts") -> None:
        if self.per_transcript is None:
            self.counts = {k: Counter(v) for k, v in other.counts.items()}
            self.widths = dict(other.widths)
            self.kinds = dict(other.kinds)
            self.per_transcript = other.per_transcript
            self.first_skeleton = other.first_skeleton
            self.trials = other.trials
            return
        if other.per_transcript != self.per_transcript:
            raise AuditError("cannot merge counts with different skeletons")
        for key, counter in other.counts.items():
            self.counts[key].update(counter)
        self.trials += other.trials


def _uniform_fit(family: RevealFamily, counter: Counter, n: int):
    """Chi-squared GOF statistic and p-value against the uniform law."""
    if n == 0 or family.domain <= 1:
        return None, None
    out_of_range = set(counter) - set(range(1, family.domain + 1))
    if out_of_range:
        raise AuditError(f"family {family.key}: observations outside 1..{family.domain}")
    expected = n / family.domain
    stat = sum(
        (counter.get(b, 0) - expected) ** 2 / expected
        for b in range(1, family.domain + 1)
    )
    p = float(chi2.sf(stat, family.domain - 1))
    return stat, p


def _tvd(a: Counter, na: int, b: Counter, nb: int) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0) / na - b.get(k, 0) / nb) for k in keys)


def uniformity_audit(transcripts, alpha: float = 0.001) -> AuditReport:
    """Chi-squared uniformity of every reveal family across honest transcripts.

    Passes when every family's p-value is at least ``alpha``; segment
    families instead require that no heart ever appeared. Fewer than 1,000
    transcripts yields an under-powered warning rather than a failure.
    """
    counts = FamilyCounts()
    for t in transcripts:
        counts.add(t)
    return _uniformity_report(counts, alpha)


def _uniformity_report(counts: FamilyCounts, alpha: float) -> AuditReport:
    warnings = []
    gated = counts.trials >= UNDERPOWERED_TRIALS
    if not gated:
        warnings.append(
            f"under-powered: {counts.trials} transcripts"
            f" (want >= {UNDERPOWERED_TRIALS}); statistics reported but not gating"
        )
    results = []
    for family in counts.families():
        counter = counts.counts[family.key]
        n = sum(counter.values())
        if family.kind == "segment":
            clean = set(counter) <= {0}
            results.append(
                FamilyResult(
                    family, n, None, None, None, clean,
                    note="" if clean else "heart seen in accept-path segment",
                )
            )
            continue
        stat, p = _uniform_fit(family, counter, n)
        if p is None:
            results.append(
                FamilyResult(family, n, None, None, None, True, note="degenerate domain")
            )
        else:
            ok = p >= alpha if gated else True
            note = "" if gated else "not gated: under-powered"
            results.append(FamilyResult(family, n, stat, p, None, ok, note=note))
    passed = all(r.passed for r in results)
    return AuditReport(counts.trials, tuple(results), passed, tuple(warnings))


def indistinguishability_audit(
    real, simulated, max_tvd: float = 0.05
) -> AuditReport:
    """Real-versus-simulated comparison per reveal family.

    Checks byte-identical event skeletons and a total variation distance of
    at most ``max_tvd`` between the empirical reveal distributions.
    """
    real_counts = FamilyCounts()
    for t in real:
        real_counts.add(t)
    sim_counts = FamilyCounts()
    for t in simulated:
        sim_counts.add(t)
    return _indistinguishability_report(real_counts, sim_counts, max_tvd)


def _indistinguishability_report(
    real_counts: FamilyCounts, sim_counts: FamilyCounts, max_tvd: float
) -> AuditReport:
    warnings = []
    gated = real_counts.trials >= UNDERPOWERED_TRIALS
    if not gated:
        warnings.append(
            f"under-powered: {real_counts.trials} transcripts"
            f" (want >= {UNDERPOWERED_TRIALS}); statistics reported but not gating"
        )
    if real_counts.trials != sim_counts.trials:
        warnings.append(
            f"trial counts differ: {real_counts.trials} real vs {sim_counts.trials} simulated"
        )
    skeleton_ok = real_counts.first_skeleton == sim_counts.first_skeleton
    if not skeleton_ok:
        warnings.append(_skeleton_diff(real_counts.first_skeleton, sim_counts.first_skeleton))
    results = []
    for family in real_counts.families():
        a = real_counts.counts[family.key]
        b = sim_counts.counts.get(family.key, Counter())
        na, nb = sum(a.values()), sum(b.values())
        if na == 0 and nb == 0:
            results.append(FamilyResult(family, 0, None, None, 0.0, True, note="empty family"))
            continue
        if nb == 0:
            results.append(
                FamilyResult(family, na, None, None, 1.0, False, note="family missing from simulation")
            )
            continue
        tvd = _tvd(a, na, b, nb)
        ok = tvd <= max_tvd if gated else True
        note = "" if gated else "not gated: under-powered"
        results.append(FamilyResult(family, na, None, None, tvd, ok, note=note))
    missing = set(sim_counts.counts) - set(real_counts.counts)
    for key in sorted(missing):
        fam = RevealFamily(key, sim_counts.kinds[key], 0)
        results.append(FamilyResult(fam, 0, None, None, 1.0, False, note="family only in simulation"))
    passed = skeleton_ok and all(r.passed for r in results)
    return AuditReport(real_counts.trials, tuple(results), passed, tuple(warnings))


def _skeleton_diff(a: str | None, b: str | None) -> str:
    a_lines = (a or "").splitlines()
    b_lines = (b or "").splitlines()
    for i, (la, lb) in enumerate(zip(a_lines, b_lines), start=1):
        if la != lb:
            return f"skeleton mismatch at line {i}: real={la!r} simulated={lb!r}"
    return f"skeleton length mismatch: real={len(a_lines)} simulated={len(b_lines)} lines"


def simulate_transcript(
    puzzle: Puzzle, rng: RandomSource, dedupe_directions: bool = False
) -> Transcript:
    """An accepting transcript drawn without any solution.

    The event skeleton is a function of the puzzle shape alone; every heart
    position is drawn uniformly over its matrix width and every room reveal
    is a uniform permutation of the room's value range.
    """
    k = max_room_size(puzzle)
    t = Transcript()
    directions = ("right", "down") if dedupe_directions else ("right", "left", "up", "down")
    wide = 2 * k - 1 if k > 1 else 1

    def heart_row(mid: str, row: int, width: int) -> int:
        j = rng.offset(width) + 1
        t.reveal_row(mid, row, tuple(encode(j, width)))
        return j

    def sim_rearr(mid: str, width: int) -> None:
        t.mark(f"rearr:{mid}", "enter")
        j = heart_row(mid, 1, width)
        t.shift(mid, (1 - j) % width)
        t.mark(f"rearr:{mid}", "exit")

    t.mark("distance_phase", "enter")
    for cell in puzzle.cells:
        for direction in directions:
            t.mark(f"dist:{cell[0]},{cell[1]}:{direction}", "enter")
            j1 = heart_row("M", 2, k)
            t.shift("M", (k - j1) % k)
            sim_rearr("M1", k)
            heart_row("M2", 1, wide)
            t.mark("unique:N", "enter")
            j = heart_row("N", 2, k)
            t.reveal_segment("N", j, 3, k + 2, (0,) * k)
            t.mark("unique:N", "exit")
            sim_rearr("N", k)
            if k > 1:
                j3 = heart_row("M2", 2, wide)
                t.shift("M2", (k + 1 - j3) % wide)
            sim_rearr("M2", k)
            t.mark(f"dist:{cell[0]},{cell[1]}:{direction}", "exit")
    t.mark("distance_phase", "exit")

    t.mark("room_phase", "enter")
    for room, cells in puzzle.room_cells.items():
        t.mark(f"room:{room}", "enter")
        perm = rng.permutation(len(cells))
        cols = tuple(tuple(encode(v + 1, k)) for v in perm)
        t.reveal_all(f"R:{room}", cols)
        t.mark(f"room:{room}", "exit")
    t.mark("room_phase", "exit")
    t.verdict("accept", None, None)
    return t


@dataclass(frozen=True)
class SweepReport:
    """Outcome of the exhaustive single-cell mutation sweep."""

    mutations_tested: int
    reject_expected: int
    still_valid: int
    runs: int
    false_accepts: tuple[tuple, ...]
    missed_rejects: tuple[tuple, ...]

    @property
    def passed(self) -> bool:
        return not self.false_accepts and not self.missed_rejects


def soundness_sweep(
    puzzle: Puzzle,
    solution: Assignment,
    rng: RandomSource,
    seeds_per_mutation: int = 1,
    workers: int | None = None,
) -> SweepReport:
    """Run the protocol on every single-cell mutation of a known solution.

    A mutation whose effective committed grid (clue cells cannot be
    tampered with: their placement is public) still satisfies the rules is
    excluded from the reject expectation; every other mutation must be
    rejected on every seed tried.
    """
    if validate(puzzle, solution):
        raise ValueError("soundness sweep needs a valid solution as its base")
    k = max_room_size(puzzle)
    jobs = []
    for cell in puzzle.cells:
        current = solution[cell]
        for value in range(1, k + 1):
            if value == current:
                continue
            seeds = tuple(rng.offset(2**32) for _ in range(seeds_per_mutation))
            jobs.append((cell, value, seeds))

    if workers and workers > 1 and len(jobs) > 1:
        ctx = get_context("fork")
        chunks = [jobs[i::workers] for i in range(workers)]
        with ctx.Pool(workers) as pool:
            parts = pool.starmap(
                _sweep_chunk, [(puzzle, solution, chunk) for chunk in chunks]
            )
    else:
        parts = [_sweep_chunk(puzzle, solution, jobs)]

    reject_expected = sum(p[0] for p in parts)
    still_valid = sum(p[1] for p in parts)
    runs = sum(p[2] for p in parts)
    false_accepts = tuple(x for p in parts for x in p[3])
    missed = tuple(x for p in parts for x in p[4])
    return SweepReport(len(jobs), reject_expected, still_valid, runs, false_accepts, missed)


def _sweep_chunk(puzzle: Puzzle, solution: Assignment, jobs):
    reject_expected = 0
    still_valid = 0
    runs = 0
    false_accepts = []
    missed_rejects = []
    fixed = puzzle.fixed
    for cell, value, seeds in jobs:
        mutated = solution.with_value(cell, value)
        effective = mutated if cell not in fixed else solution
        expect_reject = bool(validate(puzzle, effective))
        if expect_reject:
            reject_expected += 1
        else:
            still_valid += 1
        prover = ProverInput(mutated, honest=False)
        for seed in seeds:
            runs += 1
            verdict, _, _ = run_protocol(puzzle, prover, RandomSource(seed))
            if verdict.accepted and expect_reject:
                false_accepts.append((cell, value, seed))
            if not verdict.accepted and not expect_reject:
                missed_rejects.append((cell, value, seed))
    return reject_expected, still_valid, runs, false_accepts, missed_rejects


def gather_real_counts(
    puzzle: Puzzle,
    solution: Assignment,
    trials: int,
    base_seed: int,
    dedupe_directions: bool = False,
    workers: int | None = None,
) -> FamilyCounts:
    """Family histograms over ``trials`` honest protocol runs (streaming)."""
    return _gather(puzzle, solution, trials, base_seed, dedupe_directions, workers, real=True)


def gather_simulated_counts(
    puzzle: Puzzle,
    trials: int,
    base_seed: int,
    dedupe_directions: bool = False,
    workers: int | None = None,
) -> FamilyCounts:
    """Family histograms over ``trials`` simulator transcripts (streaming)."""
    return _gather(puzzle, None, trials, base_seed, dedupe_directions, workers, real=False)


def _gather(puzzle, solution, trials, base_seed, dedupe, workers, real):
    if workers and workers > 1 and trials >= 2 * workers:
        ctx = get_context("fork")
        bounds = [
            (base_seed + (trials * w) // workers, base_seed + (trials * (w + 1)) // workers)
            for w in range(workers)
        ]
        with ctx.Pool(workers) as pool:
            parts = pool.starmap(
                _gather_chunk,
                [(puzzle, solution, lo, hi, dedupe, real) for lo, hi in bounds],
            )
        counts = FamilyCounts()
        for part in parts:
            counts.merge(part)
        return counts
    return _gather_chunk(puzzle, solution, base_seed, base_seed + trials, dedupe, real)


def _gather_chunk(puzzle, solution, seed_lo, seed_hi, dedupe, real):
    counts = FamilyCounts()
    if real:
        prover = ProverInput(solution)
        for seed in range(seed_lo, seed_hi):
            verdict, transcript, _ = run_protocol(
                puzzle, prover, RandomSource(seed), dedupe_directions=dedupe
            )
            if not verdict.accepted:
                raise AuditError(f"honest run rejected at seed {seed}: {verdict.reason}")
            counts.add(transcript)
    else:
        for seed in range(seed_lo, seed_hi):
            counts.add(simulate_transcript(puzzle, RandomSource(seed), dedupe))
    return counts


def full_audit(
    puzzle: Puzzle,
    solution: Assignment,
    trials: int,
    base_seed: int,
    alpha: float = 0.001,
    max_tvd: float = 0.05,
    dedupe_directions: bool = False,
    workers: int | None = None,
) -> AuditReport:
    """Uniformity plus indistinguishability in one report.

    Runs ``trials`` honest sessions and ``trials`` simulations (seed ranges
    disjoint but deterministic), then merges the chi-squared and TVD
    verdicts per family: a family passes when both do.
    """
    real = gather_real_counts(puzzle, solution, trials, base_seed, dedupe_directions, workers)
    sim = gather_simulated_counts(puzzle, trials, base_seed + trials, dedupe_directions, workers)
    uni = _uniformity_report(real, alpha)
    ind = _indistinguishability_report(real, sim, max_tvd)
    by_key = {fr.family.key: fr for fr in ind.families}
    merged = []
    for fr in uni.families:
        other = by_key.get(fr.family.key)
        tvd = other.tvd if other else None
        ok = fr.passed and (other.passed if other else False)
        note = fr.note or (other.note if other else "")
        merged.append(
            FamilyResult(fr.family, fr.observations, fr.chi_squared, fr.p_value, tvd, ok, note)
        )
    passed = all(r.passed for r in merged) and ind.passed and uni.passed
    warnings = []
    for w in uni.warnings + ind.warnings:
        if w not in warnings:
            warnings.append(w)
    return AuditReport(trials, tuple(merged), passed, tuple(warnings))
