"""Benchmark harness: run the synthesizer over a corpus with a ground-truth
oracle, compare modes, and report solve times, enumeration counts, question
counts and held-out accuracy."""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from pathlib import Path

from . import engine, orchestrator
from .dsl import CLASS_MEMBERS
from .model import (
    CharClass,
    CharLiteral,
    Concat,
    ExampleSet,
    Group,
    Kleene,
    Option,
    Plus,
    Range,
    RegexValidation,
    Union,
    count_groups,
    parse_benchmark,
    validate,
)

logger = logging.getLogger("regval.bench")

MODES = ("multitree", "ktree", "no-pruning", "dynamic-only")


@dataclass(frozen=True)
class BenchmarkCase:
    name: str
    examples: ExampleSet
    truth: RegexValidation


@dataclass
class CaseResult:
    case: str
    mode: str
    solved: bool
    seconds: float
    programs: int
    questions: int
    accurate: bool | None
    error: str | None = None


@dataclass
class SuiteReport:
    rows: list[CaseResult]
    timeout: float

    def solved_within(self, seconds: float, mode: str) -> int:
        return sum(
            1
            for r in self.rows
            if r.mode == mode and r.solved and r.seconds <= seconds
        )

    def modes(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.mode not in seen:
                seen.append(r.mode)
        return seen


def bundled_corpus() -> Path:
    return Path(__file__).resolve().parent / "corpus"


def load_corpus(root: Path) -> list[BenchmarkCase]:
    cases = []
    case_dir = root / "cases"
    for path in sorted(case_dir.iterdir()):
        if not path.is_dir():
            continue
        examples = parse_benchmark((path / "examples.txt").read_text(encoding="utf-8"))
        truth = engine.parse_validation((path / "truth.txt").read_text(encoding="utf-8"))
        report = validate(truth, examples)
        if not report.ok:
            raise ValueError(
                f"case {path.name}: ground truth fails its own examples: "
                + "; ".join(e.reason for e in report.failures())
            )
        cases.append(BenchmarkCase(path.name, examples, truth))
    if not cases:
        raise OSError(f"no cases under {case_dir}")
    return cases


def mode_config(mode: str, timeout: float) -> orchestrator.SynthesisConfig:
    if mode == "multitree":
        return orchestrator.SynthesisConfig(timeout=timeout)
    if mode == "ktree":
        return orchestrator.SynthesisConfig(mode="ktree", timeout=timeout)
    if mode == "no-pruning":
        return orchestrator.SynthesisConfig(pruning=False, timeout=timeout)
    if mode == "dynamic-only":
        return orchestrator.SynthesisConfig(split=False, timeout=timeout)
    raise ValueError(f"unknown mode {mode!r}")


def subsample_examples(examples: ExampleSet, cap: int, seed: int) -> ExampleSet:
    """At most `cap` valid and `cap` invalid examples, sampled without
    replacement; conditional invalid examples are kept as provided."""
    rng = random.Random(seed)

    def pick(items):
        if len(items) <= cap:
            return tuple(items)
        return tuple(sorted(rng.sample(list(items), cap), key=items.index))

    return ExampleSet(pick(examples.valid), pick(examples.invalid), examples.conditional_invalid)


def run_case(
    case: BenchmarkCase,
    mode: str,
    timeout: float,
    seed: int = 1,
    subsample: int | None = None,
    holdout_counts: tuple[int, int, int] = (30, 30, 10),
) -> CaseResult:
    examples = case.examples
    if subsample is not None:
        examples = subsample_examples(examples, subsample, seed)
    config = mode_config(mode, timeout)
    oracle = orchestrator.GroundTruthOracle(case.truth)
    t0 = time.monotonic()
    try:
        session = orchestrator.run(examples, config, oracle)
    except Exception as exc:  # a failing case must not abort the suite
        logger.exception("case %s (%s) crashed", case.name, mode)
        return CaseResult(case.name, mode, False, time.monotonic() - t0, 0, 0, None, str(exc))
    seconds = time.monotonic() - t0
    solved = session.phase == orchestrator.PHASE_DONE and not session.best_effort
    accurate = None
    if solved:
        accurate = holdout_agreement(session.result, case.truth, seed + 1000, holdout_counts)
    return CaseResult(
        case.name,
        mode,
        solved,
        seconds,
        session.stats.programs_enumerated,
        session.stats.questions,
        accurate,
        session.failure,
    )


def run_suite(
    cases,
    modes=("multitree",),
    timeout: float = 60.0,
    seed: int = 1,
    subsample: int | None = None,
) -> SuiteReport:
    rows = []
    for case in cases:
        for mode in modes:
            result = run_case(case, mode, timeout, seed=seed, subsample=subsample)
            logger.info(
                "%s/%s: solved=%s %.2fs programs=%d questions=%d accurate=%s",
                case.name,
                mode,
                result.solved,
                result.seconds,
                result.programs,
                result.questions,
                result.accurate,
            )
            rows.append(result)
    return SuiteReport(rows, timeout)


# ---------------------------------------------------------------------------
# Held-out accuracy


def classify(validation: RegexValidation, s: str) -> tuple[bool, bool]:
    """(matches, accepted): accepted means matched and all conditions hold."""
    if not engine.full_match(validation.regex, s):
        return False, False
    if not validation.conditions:
        return True, True
    try:
        values = engine.extract_captures(validation.regex, s)
    except engine.NonNumericCapture:
        return True, False
    return True, all(c.holds(values[c.group]) for c in validation.conditions)


def holdout_agreement(result: RegexValidation, truth: RegexValidation, seed: int, counts) -> bool:
    n_valid, n_invalid, n_conditional = counts
    if not truth.conditions:
        n_conditional = 0
    try:
        holdout = generate_examples(truth, n_valid, n_invalid, n_conditional, seed)
    except GenerationError:
        holdout = generate_examples(truth, 5, 5, 0, seed)
    strings = list(holdout.valid) + list(holdout.invalid) + list(holdout.conditional_invalid)
    return all(classify(result, s) == classify(truth, s) for s in strings)


# ---------------------------------------------------------------------------
# Example generation from a ground truth


class GenerationError(ValueError):
    pass


def sample_string(ast, rng: random.Random) -> str:
    if isinstance(ast, CharLiteral):
        return ast.char
    if isinstance(ast, CharClass):
        return rng.choice(sorted(CLASS_MEMBERS[ast.name]))
    if isinstance(ast, Group):
        return sample_string(ast.child, rng)
    if isinstance(ast, Union):
        return sample_string(ast.left if rng.random() < 0.5 else ast.right, rng)
    if isinstance(ast, Concat):
        return "".join(sample_string(c, rng) for c in ast.children)
    if isinstance(ast, Kleene):
        return "".join(sample_string(ast.child, rng) for _ in range(rng.randint(0, 3)))
    if isinstance(ast, Plus):
        return "".join(sample_string(ast.child, rng) for _ in range(rng.randint(1, 3)))
    if isinstance(ast, Option):
        return sample_string(ast.child, rng) if rng.random() < 0.5 else ""
    if isinstance(ast, Range):
        lo, hi = (
            (ast.reps.times, ast.reps.times)
            if hasattr(ast.reps, "times")
            else (ast.reps.lo, ast.reps.hi)
        )
        return "".join(sample_string(ast.child, rng) for _ in range(rng.randint(lo, hi)))
    raise GenerationError(f"cannot sample from {ast!r}")


def _mutate(s: str, pool: str, rng: random.Random) -> str:
    ops = ["drop", "insert", "replace", "swap", "truncate"]
    op = rng.choice(ops)
    if not s:
        return rng.choice(pool)
    i = rng.randrange(len(s))
    if op == "drop":
        return s[:i] + s[i + 1 :]
    if op == "insert":
        return s[:i] + rng.choice(pool) + s[i:]
    if op == "replace":
        return s[:i] + rng.choice(pool) + s[i + 1 :]
    if op == "swap" and len(s) >= 2:
        j = rng.randrange(len(s))
        lst = list(s)
        lst[i], lst[j] = lst[j], lst[i]
        return "".join(lst)
    return s[: max(1, len(s) - 1)]


def generate_examples(
    truth: RegexValidation,
    n_valid: int,
    n_invalid: int,
    n_conditional: int = 0,
    seed: int = 1,
    max_tries: int = 4000,
) -> ExampleSet:
    """Deterministic sampling: valid strings from the truth's language (and
    satisfying its conditions), invalid strings by mutation until the regex
    rejects them, conditional-invalid strings by splicing condition-violating
    capture values into matching strings."""
    if n_valid < 1:
        raise GenerationError("at least one valid example is required")
    if n_conditional > 0 and not truth.conditions:
        raise GenerationError("truth has no conditions to violate")
    rng = random.Random(seed)

    valid: list[str] = []
    tries = 0
    while len(valid) < n_valid:
        tries += 1
        if tries > max_tries:
            raise GenerationError("language too small to sample the requested valid count")
        s = sample_string(truth.regex, rng)
        if s and s not in valid and classify(truth, s) == (True, True):
            valid.append(s)

    pool = sorted({c for s in valid for c in s}) or ["a"]
    invalid: list[str] = []
    tries = 0
    while len(invalid) < n_invalid:
        tries += 1
        if tries > max_tries:
            raise GenerationError("could not derive the requested invalid count")
        s = _mutate(rng.choice(valid), pool, rng)
        if s not in valid and s not in invalid and not engine.full_match(truth.regex, s):
            invalid.append(s)

    conditional: list[str] = []
    tries = 0
    while len(conditional) < n_conditional:
        tries += 1
        if tries > max_tries:
            raise GenerationError("could not derive the requested conditional-invalid count")
        base = rng.choice(valid)
        spans = engine.capture_spans(truth.regex, base)
        cond = rng.choice(truth.conditions)
        a, b = spans[cond.group]
        width = b - a
        bad_value = cond.bound + rng.randint(1, 9) if cond.op.value == "<=" else cond.bound - rng.randint(1, 9)
        if bad_value < 0:
            continue
        text = str(bad_value).zfill(width)
        if len(text) != width:
            continue
        s = base[:a] + text + base[b:]
        if s in valid or s in invalid or s in conditional:
            continue
        matches, accepted = classify(truth, s)
        if matches and not accepted:
            conditional.append(s)

    return ExampleSet(tuple(valid), tuple(invalid), tuple(conditional))


# ---------------------------------------------------------------------------
# Reports


def render_table(report: SuiteReport) -> str:
    headers = ["case", "mode", "solved", "seconds", "programs", "questions", "accurate"]
    rows = [
        [
            r.case,
            r.mode,
            "yes" if r.solved else "no",
            f"{r.seconds:.2f}",
            str(r.programs),
            str(r.questions),
            {None: "-", True: "yes", False: "NO"}[r.accurate],
        ]
        for r in report.rows
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in rows]
    lines.append("")
    for mode in report.modes():
        total = sum(1 for r in report.rows if r.mode == mode)
        lines.append(
            f"{mode}: {report.solved_within(10, mode)} solved <10s, "
            f"{report.solved_within(60, mode)} <60s, "
            f"{report.solved_within(report.timeout, mode)} within the {report.timeout:.0f}s budget "
            f"(of {total})"
        )
    return "\n".join(lines)


def to_csv(report: SuiteReport) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["case", "mode", "solved", "seconds", "programs", "questions", "accurate"])
    for r in report.rows:
        writer.writerow(
            [
                r.case,
                r.mode,
                int(r.solved),
                f"{r.seconds:.3f}",
                r.programs,
                r.questions,
                "" if r.accurate is None else int(r.accurate),
            ]
        )
    return buf.getvalue()
