"""Core domain types: example sets, regex ASTs, capture conditions, validations."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class ExampleSetError(ValueError):
    """Raised when an example set violates its invariants."""


class BenchmarkFormatError(ExampleSetError):
    """Raised when a benchmark file cannot be parsed."""


# ---------------------------------------------------------------------------
# Regex AST


class RegexAst:
    """Base class for all regex AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Exact:
    """Repetition count {m}, m >= 2."""

    times: int

    def __post_init__(self):
        if self.times < 2:
            raise ValueError(f"exact repetition must be >= 2, got {self.times}")


@dataclass(frozen=True)
class Between:
    """Repetition window {lo,hi} with 0 <= lo < hi and (lo,hi) != (0,1)."""

    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise ValueError(f"bad repetition window ({self.lo},{self.hi})")
        if (self.lo, self.hi) == (0, 1):
            raise ValueError("window (0,1) is the option quantifier")


RangeLit = Exact | Between


@dataclass(frozen=True)
class CharLiteral(RegexAst):
    char: str


@dataclass(frozen=True)
class CharClass(RegexAst):
    name: str  # one of the fixed class spellings, e.g. "[0-9]"


@dataclass(frozen=True)
class Union(RegexAst):
    left: RegexAst
    right: RegexAst


@dataclass(frozen=True)
class Concat(RegexAst):
    children: tuple[RegexAst, ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("concat needs arity >= 2")


@dataclass(frozen=True)
class Kleene(RegexAst):
    child: RegexAst


@dataclass(frozen=True)
class Plus(RegexAst):
    child: RegexAst


@dataclass(frozen=True)
class Option(RegexAst):
    child: RegexAst


@dataclass(frozen=True)
class Range(RegexAst):
    child: RegexAst
    reps: RangeLit


@dataclass(frozen=True)
class Group(RegexAst):
    """Capturing group; non-nested, added after pattern synthesis."""

    child: RegexAst


def flatten_concat(ast: RegexAst) -> list[RegexAst]:
    """Top-level concatenation units of `ast` (singleton list if not a concat)."""
    if isinstance(ast, Concat):
        out: list[RegexAst] = []
        for child in ast.children:
            out.extend(flatten_concat(child))
        return out
    return [ast]


def normalize(ast: RegexAst) -> RegexAst:
    """Canonical shape: concat chains flattened, unions left-associated."""
    if isinstance(ast, Concat):
        units = [normalize(u) for u in flatten_concat(ast)]
        return units[0] if len(units) == 1 else Concat(tuple(units))
    if isinstance(ast, Union):
        # rebuild as a left-leaning chain over the flattened alternatives
        alts: list[RegexAst] = []
        stack = [ast]
        while stack:
            node = stack.pop()
            if isinstance(node, Union):
                stack.append(node.right)
                stack.append(node.left)
            else:
                alts.append(normalize(node))
        out = alts[0]
        for alt in alts[1:]:
            out = Union(out, alt)
        return out
    if isinstance(ast, Kleene):
        return Kleene(normalize(ast.child))
    if isinstance(ast, Plus):
        return Plus(normalize(ast.child))
    if isinstance(ast, Option):
        return Option(normalize(ast.child))
    if isinstance(ast, Range):
        return Range(normalize(ast.child), ast.reps)
    if isinstance(ast, Group):
        return Group(normalize(ast.child))
    return ast


def count_groups(ast: RegexAst) -> int:
    if isinstance(ast, Group):
        return 1 + count_groups(ast.child)
    if isinstance(ast, Union):
        return count_groups(ast.left) + count_groups(ast.right)
    if isinstance(ast, Concat):
        return sum(count_groups(c) for c in ast.children)
    if isinstance(ast, (Kleene, Plus, Option)):
        return count_groups(ast.child)
    if isinstance(ast, Range):
        return count_groups(ast.child)
    return 0


# ---------------------------------------------------------------------------
# Capture conditions


class Cmp(Enum):
    LE = "<="
    GE = ">="


@dataclass(frozen=True)
class CaptureCondition:
    """Constraint `$group op bound` on the integer value of a capturing group."""

    group: int
    op: Cmp
    bound: int

    def __post_init__(self):
        if self.group < 0:
            raise ValueError("group index must be >= 0")

    def holds(self, value: int) -> bool:
        return value <= self.bound if self.op is Cmp.LE else value >= self.bound

    def render(self) -> str:
        return f"${self.group} {self.op.value} {self.bound}"


def parse_condition(text: str) -> CaptureCondition:
    parts = text.split()
    if len(parts) != 3 or not parts[0].startswith("$"):
        raise ValueError(f"bad capture condition: {text!r}")
    group = int(parts[0][1:])
    try:
        op = Cmp(parts[1])
    except ValueError:
        raise ValueError(f"bad comparison operator in {text!r}") from None
    return CaptureCondition(group, op, int(parts[2]))


@dataclass(frozen=True)
class RegexValidation:
    """A regex (with zero or more groups) plus a conjunction of capture conditions."""

    regex: RegexAst
    conditions: tuple[CaptureCondition, ...] = ()

    def __post_init__(self):
        n = count_groups(self.regex)
        for cond in self.conditions:
            if cond.group >= n:
                raise ValueError(f"condition {cond.render()} references missing group")


# ---------------------------------------------------------------------------
# Example sets


@dataclass(frozen=True)
class ExampleSet:
    """Valid / invalid / conditional-invalid example strings.

    Duplicates within one list are dropped (first occurrence kept); a string
    appearing in two different lists is an error, as is an empty valid set.
    The empty string is only permitted as an invalid example.
    """

    valid: tuple[str, ...]
    invalid: tuple[str, ...] = ()
    conditional_invalid: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "valid", _dedup(self.valid))
        object.__setattr__(self, "invalid", _dedup(self.invalid))
        object.__setattr__(self, "conditional_invalid", _dedup(self.conditional_invalid))
        if not self.valid:
            raise ExampleSetError("at least one valid example is required")
        sets = [set(self.valid), set(self.invalid), set(self.conditional_invalid)]
        names = ["valid", "invalid", "conditional invalid"]
        for i in range(3):
            for j in range(i + 1, 3):
                overlap = sets[i] & sets[j]
                if overlap:
                    raise ExampleSetError(
                        f"{next(iter(overlap))!r} listed as both {names[i]} and {names[j]}"
                    )
        if "" in sets[0] or "" in sets[2]:
            raise ExampleSetError("the empty string is only allowed as an invalid example")


def _dedup(items) -> tuple[str, ...]:
    seen = set()
    out = []
    for s in items:
        if not isinstance(s, str):
            raise ExampleSetError(f"examples must be strings, got {type(s).__name__}")
        if s not in seen:
            seen.add(s)
            out.append(s)
    return tuple(out)


_SECTION_KEYS = {"++": "valid", "--": "invalid", "+-": "conditional_invalid"}


def parse_benchmark(text: str) -> ExampleSet:
    """Parse the sectioned benchmark format.

    Lines `++`, `--`, `+-` open the valid, invalid and conditional-invalid
    sections; every following non-empty line is one example verbatim.
    Sections may appear in any order; `++` is mandatory.
    """
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if line in _SECTION_KEYS:
            key = _SECTION_KEYS[line]
            if key in sections:
                raise BenchmarkFormatError(f"line {lineno}: duplicate section {line!r}")
            current = sections.setdefault(key, [])
            continue
        if not line:
            continue
        if current is None:
            raise BenchmarkFormatError(f"line {lineno}: example before any section header")
        current.append(line)
    if "valid" not in sections or not sections["valid"]:
        raise BenchmarkFormatError("the valid (++) section is mandatory and must be non-empty")
    return ExampleSet(
        valid=tuple(sections.get("valid", ())),
        invalid=tuple(sections.get("invalid", ())),
        conditional_invalid=tuple(sections.get("conditional_invalid", ())),
    )


def serialize_benchmark(examples: ExampleSet) -> str:
    lines = ["++", *examples.valid]
    if examples.invalid:
        lines += ["--", *examples.invalid]
    if examples.conditional_invalid:
        lines += ["+-", *examples.conditional_invalid]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation report


@dataclass(frozen=True)
class ReportEntry:
    example: str
    kind: str  # "valid" | "invalid" | "conditional_invalid"
    ok: bool
    reason: str


@dataclass(frozen=True)
class ValidationReport:
    entries: tuple[ReportEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def failures(self) -> list[ReportEntry]:
        return [e for e in self.entries if not e.ok]


def validate(validation: RegexValidation, examples: ExampleSet) -> ValidationReport:
    """Check every example against the three regex-validation clauses."""
    from . import engine  # local import: engine depends on these types

    entries: list[ReportEntry] = []
    has_groups = count_groups(validation.regex) > 0

    def conditions_hold(s: str) -> tuple[bool, str]:
        if not validation.conditions:
            return True, "no conditions"
        if not has_groups:
            return False, "conditions present but regex has no groups"
        try:
            captures = engine.extract_captures(validation.regex, s)
        except engine.NonNumericCapture:
            return False, "captured text is not an integer"
        bad = [c for c in validation.conditions if not c.holds(captures[c.group])]
        if bad:
            return False, "violates " + ", ".join(c.render() for c in bad)
        return True, "satisfies all conditions"

    for s in examples.valid:
        if not engine.full_match(validation.regex, s):
            entries.append(ReportEntry(s, "valid", False, "valid example not matched"))
            continue
        ok, why = conditions_hold(s)
        entries.append(ReportEntry(s, "valid", ok, "matched; " + why))

    for s in examples.invalid:
        if engine.full_match(validation.regex, s):
            entries.append(ReportEntry(s, "invalid", False, "invalid example matched"))
        else:
            entries.append(ReportEntry(s, "invalid", True, "not matched"))

    for s in examples.conditional_invalid:
        if not engine.full_match(validation.regex, s):
            entries.append(
                ReportEntry(s, "conditional_invalid", False, "conditional invalid example not matched")
            )
            continue
        ok, why = conditions_hold(s)
        if ok:
            entries.append(
                ReportEntry(s, "conditional_invalid", False, "matched but violates no condition")
            )
        else:
            entries.append(ReportEntry(s, "conditional_invalid", True, "matched; " + why))

    return ValidationReport(tuple(entries))
