"""Regex evaluation: concrete syntax, automata, captures, distinguishing inputs.

Boolean matching runs on a Thompson NFA built over symbol predicates, so it
works for arbitrary strings.  Equivalence and distinguishing-input search use
DFAs obtained by subset construction over a finite session alphabet (the
example characters, one representative per DSL class, and one out-of-class
character).  Capture extraction delegates to the stdlib `re` engine applied to
the emitted pattern; group numbering is tracked during emission.
"""

from __future__ import annotations

import re as _stdlib_re
from dataclasses import dataclass
from functools import lru_cache

from .dsl import CLASS_MEMBERS, CLASS_ORDER
from .model import (
    Between,
    CharClass,
    CharLiteral,
    Concat,
    Exact,
    Group,
    Kleene,
    Option,
    Plus,
    Range,
    RegexAst,
    Union,
)

REPEAT_CAP = 64  # structural expansion bound for {m,n}


class EngineError(ValueError):
    pass


class RegexParseError(EngineError):
    pass


class NoMatch(EngineError):
    """String not matched when a match was required."""


class NonNumericCapture(EngineError):
    """A captured text is not a non-empty digit string."""


# ---------------------------------------------------------------------------
# Emission

_PREC_UNION, _PREC_CONCAT, _PREC_POSTFIX, _PREC_ATOM = 0, 1, 2, 3
_METACHARS = set(".^$*+?()[]{}|\\")


def escape_char(c: str) -> str:
    return "\\" + c if c in _METACHARS else c


def _emit(ast: RegexAst, out: list[str], groups: list[int], depth: list[int]) -> int:
    """Append the rendering of `ast` to `out`, returning its precedence level.

    `groups` collects, per Group node in left-to-right order, the index of its
    opening parenthesis among all capturing parentheses (1-based, matching the
    stdlib engine's numbering).  `depth[0]` counts capturing parens so far.
    """

    def child(node, min_prec):
        mark = len(out)
        prec = _emit(node, out, groups, depth)
        if prec < min_prec:
            out.insert(mark, "(?:")
            out.append(")")

    if isinstance(ast, CharLiteral):
        out.append(escape_char(ast.char))
        return _PREC_ATOM
    if isinstance(ast, CharClass):
        out.append(ast.name)
        return _PREC_ATOM
    if isinstance(ast, Group):
        depth[0] += 1
        groups.append(depth[0])
        out.append("(")
        _emit(ast.child, out, groups, depth)
        out.append(")")
        return _PREC_ATOM
    if isinstance(ast, Union):
        child(ast.left, _PREC_UNION)
        out.append("|")
        child(ast.right, _PREC_UNION)
        return _PREC_UNION
    if isinstance(ast, Concat):
        for c in ast.children:
            child(c, _PREC_CONCAT)
        return _PREC_CONCAT
    if isinstance(ast, Kleene):
        child(ast.child, _PREC_ATOM)
        out.append("*")
        return _PREC_POSTFIX
    if isinstance(ast, Plus):
        child(ast.child, _PREC_ATOM)
        out.append("+")
        return _PREC_POSTFIX
    if isinstance(ast, Option):
        child(ast.child, _PREC_ATOM)
        out.append("?")
        return _PREC_POSTFIX
    if isinstance(ast, Range):
        child(ast.child, _PREC_ATOM)
        if isinstance(ast.reps, Exact):
            out.append("{%d}" % ast.reps.times)
        else:
            out.append("{%d,%d}" % (ast.reps.lo, ast.reps.hi))
        return _PREC_POSTFIX
    raise EngineError(f"cannot emit {ast!r}")


@lru_cache(maxsize=4096)
def emit_with_groups(ast: RegexAst) -> tuple[str, tuple[int, ...]]:
    out: list[str] = []
    groups: list[int] = []
    _emit(ast, out, groups, [0])
    return "".join(out), tuple(groups)


def emit(ast: RegexAst) -> str:
    return emit_with_groups(ast)[0]


# ---------------------------------------------------------------------------
# Parsing of the emitted grammar

_CLASS_SPELLINGS = set(CLASS_ORDER)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise RegexParseError(f"{msg} at position {self.pos} in {self.text!r}")

    def peek(self) -> str | None:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take(self) -> str:
        c = self.peek()
        if c is None:
            self.error("unexpected end of pattern")
        self.pos += 1
        return c

    def parse(self) -> RegexAst:
        node = self.union()
        if self.pos != len(self.text):
            self.error("trailing characters")
        return node

    def union(self) -> RegexAst:
        node = self.concat()
        while self.peek() == "|":
            self.take()
            node = Union(node, self.concat())
        return node

    def concat(self) -> RegexAst:
        parts = []
        while self.peek() not in (None, "|", ")"):
            parts.append(self.postfix())
        if not parts:
            self.error("empty alternative")
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def postfix(self) -> RegexAst:
        node = self.atom()
        while True:
            c = self.peek()
            if c == "*":
                self.take()
                node = Kleene(node)
            elif c == "+":
                self.take()
                node = Plus(node)
            elif c == "?":
                self.take()
                node = Option(node)
            elif c == "{":
                self.take()
                node = Range(node, self.range_literal())
            else:
                return node

    def range_literal(self):
        digits = self._digits()
        if self.peek() == ",":
            self.take()
            hi = self._digits()
            if self.take() != "}":
                self.error("expected '}'")
            try:
                return Between(int(digits), int(hi))
            except ValueError as exc:
                self.error(str(exc))
        if self.take() != "}":
            self.error("expected '}'")
        try:
            return Exact(int(digits))
        except ValueError as exc:
            self.error(str(exc))

    def _digits(self) -> str:
        out = ""
        while self.peek() is not None and self.peek().isdigit():
            out += self.take()
        if not out:
            self.error("expected a number")
        return out

    def atom(self) -> RegexAst:
        c = self.take()
        if c == "(":
            capturing = True
            if self.text.startswith("?:", self.pos):
                self.pos += 2
                capturing = False
            inner = self.union()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return Group(inner) if capturing else inner
        if c == "[":
            end = self.text.find("]", self.pos)
            if end == -1:
                self.error("unterminated class")
            spelling = "[" + self.text[self.pos : end + 1]
            if spelling not in _CLASS_SPELLINGS:
                self.error(f"unknown character class {spelling!r}")
            self.pos = end + 1
            return CharClass(spelling)
        if c == "\\":
            return CharLiteral(self.take())
        if c in _METACHARS:
            self.error(f"unescaped metacharacter {c!r}")
        return CharLiteral(c)


def parse(pattern: str) -> RegexAst:
    return _Parser(pattern).parse()


# ---------------------------------------------------------------------------
# Thompson NFA over symbol predicates


@dataclass(frozen=True)
class Nfa:
    """States 0..n-1; `eps[s]` are epsilon successors, `steps[s]` labelled
    (label, target) edges where label is ("lit", char) or ("class", name)."""

    n: int
    eps: tuple[tuple[int, ...], ...]
    steps: tuple[tuple[tuple[tuple[str, str], int], ...], ...]
    start: int
    accept: int


class _NfaBuilder:
    def __init__(self):
        self.eps: list[list[int]] = []
        self.steps: list[list[tuple[tuple[str, str], int]]] = []

    def state(self) -> int:
        self.eps.append([])
        self.steps.append([])
        return len(self.eps) - 1

    def add_eps(self, a: int, b: int):
        self.eps[a].append(b)

    def add_step(self, a: int, label: tuple[str, str], b: int):
        self.steps[a].append((label, b))

    def fragment(self, ast: RegexAst) -> tuple[int, int]:
        if isinstance(ast, CharLiteral):
            s, t = self.state(), self.state()
            self.add_step(s, ("lit", ast.char), t)
            return s, t
        if isinstance(ast, CharClass):
            s, t = self.state(), self.state()
            self.add_step(s, ("class", ast.name), t)
            return s, t
        if isinstance(ast, Group):
            return self.fragment(ast.child)
        if isinstance(ast, Union):
            s, t = self.state(), self.state()
            for side in (ast.left, ast.right):
                a, b = self.fragment(side)
                self.add_eps(s, a)
                self.add_eps(b, t)
            return s, t
        if isinstance(ast, Concat):
            first, last = self.fragment(ast.children[0])
            for child in ast.children[1:]:
                a, b = self.fragment(child)
                self.add_eps(last, a)
                last = b
            return first, last
        if isinstance(ast, Kleene):
            s, t = self.state(), self.state()
            a, b = self.fragment(ast.child)
            self.add_eps(s, a)
            self.add_eps(b, a)
            self.add_eps(s, t)
            self.add_eps(b, t)
            return s, t
        if isinstance(ast, Plus):
            a, b = self.fragment(ast.child)
            t = self.state()
            self.add_eps(b, a)
            self.add_eps(b, t)
            return a, t
        if isinstance(ast, Option):
            s, t = self.state(), self.state()
            a, b = self.fragment(ast.child)
            self.add_eps(s, a)
            self.add_eps(b, t)
            self.add_eps(s, t)
            return s, t
        if isinstance(ast, Range):
            lo, hi = (
                (ast.reps.times, ast.reps.times)
                if isinstance(ast.reps, Exact)
                else (ast.reps.lo, ast.reps.hi)
            )
            if hi > REPEAT_CAP:
                raise EngineError(f"repetition bound {hi} exceeds the cap of {REPEAT_CAP}")
            s = self.state()
            last = s
            for _ in range(lo):
                a, b = self.fragment(ast.child)
                self.add_eps(last, a)
                last = b
            t = self.state()
            self.add_eps(last, t)
            for _ in range(hi - lo):
                a, b = self.fragment(ast.child)
                self.add_eps(last, a)
                last = b
                self.add_eps(last, t)
            return s, t
        raise EngineError(f"cannot build automaton for {ast!r}")


@lru_cache(maxsize=4096)
def build_nfa(ast: RegexAst) -> Nfa:
    builder = _NfaBuilder()
    start, accept = builder.fragment(ast)
    return Nfa(
        n=len(builder.eps),
        eps=tuple(tuple(e) for e in builder.eps),
        steps=tuple(tuple(s) for s in builder.steps),
        start=start,
        accept=accept,
    )


def _label_matches(label: tuple[str, str], char: str) -> bool:
    kind, value = label
    if kind == "lit":
        return value == char
    return char in CLASS_MEMBERS[value]


def _closure(nfa: Nfa, states: set[int]) -> frozenset[int]:
    stack = list(states)
    seen = set(states)
    while stack:
        s = stack.pop()
        for t in nfa.eps[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def full_match(ast: RegexAst, s: str) -> bool:
    """True iff the whole string is in the language of `ast`."""
    nfa = build_nfa(ast)
    current = _closure(nfa, {nfa.start})
    for c in s:
        nxt = {t for state in current for label, t in nfa.steps[state] if _label_matches(label, c)}
        if not nxt:
            return False
        current = _closure(nfa, nxt)
    return nfa.accept in current


def nullable(ast: RegexAst) -> bool:
    return full_match(ast, "")


@lru_cache(maxsize=65536)
def span_ends(ast: RegexAst, s: str) -> tuple[int, ...]:
    """For each start position p, a bitmask of end positions q >= p such that
    `ast` matches s[p:q].  One left-to-right NFA pass per start position is
    merged into a single sweep; origin positions travel as bitmasks."""
    nfa = build_nfa(ast)
    length = len(s)
    ends = [0] * (length + 1)
    masks: dict[int, int] = {}

    def settle(pending: list[tuple[int, int]]):
        while pending:
            state, origin = pending.pop()
            cur = masks.get(state, 0)
            if cur | origin == cur:
                continue
            masks[state] = cur | origin
            for t in nfa.eps[state]:
                pending.append((t, origin))

    for p in range(length + 1):
        settle([(nfa.start, 1 << p)])
        acc = masks.get(nfa.accept, 0)
        origin = acc
        while origin:
            low = origin & -origin
            ends[low.bit_length() - 1] |= 1 << p
            origin ^= low
        if p < length:
            c = s[p]
            moved = []
            for state, origin in masks.items():
                for label, t in nfa.steps[state]:
                    if _label_matches(label, c):
                        moved.append((t, origin))
            masks = {}
            settle(moved)
    return tuple(ends)


def ends_from(ast: RegexAst, s: str, starts_mask: int) -> int:
    """Bitmask of positions reachable by matching `ast` from any start in the mask."""
    table = span_ends(ast, s)
    out = 0
    mask = starts_mask
    while mask:
        low = mask & -mask
        out |= table[low.bit_length() - 1]
        mask ^= low
    return out


# ---------------------------------------------------------------------------
# Session alphabet


@dataclass(frozen=True)
class SessionAlphabet:
    """Finite alphabet over which equivalence is decided: all example
    characters, one representative per DSL class, one out-of-class character."""

    symbols: tuple[str, ...]
    explicit: frozenset[str]
    class_reps: tuple[tuple[str, str], ...]
    out_of_class: str | None


def build_session_alphabet(example_strings, class_names) -> SessionAlphabet:
    explicit = sorted({c for s in example_strings for c in s})
    explicit_set = frozenset(explicit)
    reps: list[tuple[str, str]] = []
    ordered_classes = sorted(class_names, key=lambda n: CLASS_ORDER[n])
    for name in ordered_classes:
        # smallest member outside the example characters: classes that agree
        # on the examples then share representatives and collapse, keeping
        # the alphabet (and the number of questions it induces) small
        members = sorted(CLASS_MEMBERS[name])
        pick = next((m for m in members if m not in explicit_set), members[0])
        reps.append((name, pick))

    all_class_chars = set()
    for name in ordered_classes:
        all_class_chars |= CLASS_MEMBERS[name]
    ooc = None
    for code in range(0x20, 0x7F):
        c = chr(code)
        if c not in all_class_chars and c not in explicit_set:
            ooc = c
            break

    symbols = list(explicit)
    for _, rep in reps:
        if rep not in symbols:
            symbols.append(rep)
    if ooc is not None:
        symbols.append(ooc)
    return SessionAlphabet(
        symbols=tuple(symbols),
        explicit=explicit_set,
        class_reps=tuple(reps),
        out_of_class=ooc,
    )


# ---------------------------------------------------------------------------
# DFA over a session alphabet: equivalence and distinguishing inputs


def _dfa(ast: RegexAst, alphabet: SessionAlphabet):
    """Subset-construction DFA restricted to the alphabet.

    Returns (transitions, accepting) where transitions[state][symbol_index]
    is the successor state id and state 0 is the start.
    """
    nfa = build_nfa(ast)
    start = _closure(nfa, {nfa.start})
    index = {start: 0}
    transitions: list[list[int]] = []
    accepting: list[bool] = []
    queue = [start]
    while queue:
        current = queue.pop(0)
        row = []
        for c in alphabet.symbols:
            nxt = {t for s in current for label, t in nfa.steps[s] if _label_matches(label, c)}
            closed = _closure(nfa, nxt) if nxt else frozenset()
            if closed not in index:
                index[closed] = len(index)
                queue.append(closed)
            row.append(index[closed])
        transitions.append(row)
        accepting.append(nfa.accept in current)
    return transitions, accepting


def distinguishing_input(r1: RegexAst, r2: RegexAst, alphabet: SessionAlphabet) -> str | None:
    """Shortest string over the alphabet accepted by exactly one regex, or
    None when the two languages coincide on the alphabet.  Ties are broken by
    the alphabet's symbol order."""
    t1, a1 = _dfa(r1, alphabet)
    t2, a2 = _dfa(r2, alphabet)
    start = (0, 0)
    if a1[0] != a2[0]:
        return ""
    seen = {start}
    queue = [(start, "")]
    while queue:
        (s1, s2), prefix = queue.pop(0)
        for i, c in enumerate(alphabet.symbols):
            nxt = (t1[s1][i], t2[s2][i])
            if nxt in seen:
                continue
            seen.add(nxt)
            word = prefix + c
            if a1[nxt[0]] != a2[nxt[1]]:
                return word
            queue.append((nxt, word))
    return None


@lru_cache(maxsize=16384)
def language_key(ast: RegexAst, alphabet: SessionAlphabet) -> tuple:
    """Canonical fingerprint of the language over the alphabet.

    Two ASTs have equal keys iff their languages restricted to the alphabet
    are equal (minimal DFA, canonically numbered by BFS order).
    """
    transitions, accepting = _dfa(ast, alphabet)
    n = len(transitions)
    # Moore minimization
    part = [1 if a else 0 for a in accepting]
    while True:
        signatures = {}
        new_part = []
        for s in range(n):
            sig = (part[s], tuple(part[t] for t in transitions[s]))
            if sig not in signatures:
                signatures[sig] = len(signatures)
            new_part.append(signatures[sig])
        if new_part == part:
            break
        part = new_part
    # canonical numbering: BFS from the start block in symbol order
    block_trans = {}
    block_acc = {}
    for s in range(n):
        block_trans[part[s]] = tuple(part[t] for t in transitions[s])
        block_acc[part[s]] = accepting[s]
    order = {part[0]: 0}
    queue = [part[0]]
    while queue:
        b = queue.pop(0)
        for t in block_trans[b]:
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    rows = [None] * len(order)
    acc = [False] * len(order)
    for b, i in order.items():
        rows[i] = tuple(order[t] for t in block_trans[b])
        acc[i] = block_acc[b]
    return tuple(rows), tuple(acc)


# ---------------------------------------------------------------------------
# Captures


@lru_cache(maxsize=4096)
def _compiled(ast: RegexAst):
    pattern, group_indices = emit_with_groups(ast)
    return _stdlib_re.compile(pattern), group_indices


def extract_captures(ast: RegexAst, s: str) -> list[int]:
    """Integer values of the capturing groups on a full match of `s`.

    Raises NoMatch when the string is not matched and NonNumericCapture when
    any captured text is not a non-empty digit string.  Leading zeros are
    allowed ("08" -> 8).
    """
    compiled, group_indices = _compiled(ast)
    m = compiled.fullmatch(s)
    if m is None:
        raise NoMatch(f"{s!r} does not match {compiled.pattern}")
    values = []
    for idx in group_indices:
        text = m.group(idx)
        if text is None or text == "" or not text.isdigit():
            raise NonNumericCapture(f"group {idx} captured {text!r}")
        values.append(int(text))
    return values


def captured_texts(ast: RegexAst, s: str) -> list[str]:
    """Raw captured texts of a full match (used for splicing new values in)."""
    compiled, group_indices = _compiled(ast)
    m = compiled.fullmatch(s)
    if m is None:
        raise NoMatch(f"{s!r} does not match {compiled.pattern}")
    return [m.group(i) or "" for i in group_indices]


def capture_spans(ast: RegexAst, s: str) -> list[tuple[int, int]]:
    compiled, group_indices = _compiled(ast)
    m = compiled.fullmatch(s)
    if m is None:
        raise NoMatch(f"{s!r} does not match {compiled.pattern}")
    return [m.span(i) for i in group_indices]


# ---------------------------------------------------------------------------
# Validation text format: the regex on the first non-blank line, one
# condition per following line ("$0 <= 31").


def parse_validation(text: str):
    from .model import RegexValidation, parse_condition

    regex = None
    conditions = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if regex is None:
            regex = parse(line)
        else:
            conditions.append(parse_condition(line))
    if regex is None:
        raise RegexParseError("validation text holds no regex")
    return RegexValidation(regex, tuple(conditions))


def render_validation(validation) -> str:
    lines = [emit(validation.regex)]
    lines.extend(c.render() for c in validation.conditions)
    return "\n".join(lines) + "\n"
