"""Stage two: capturing-group placement and integer capture conditions.

The winning regex is cut into its atomic units (the flattened top-level
concatenation); capturing groups are contiguous runs of those units.  For a
placement, the condition system pairs every group with both comparison
operators, and a maximizing solve over soft negations of the usage variables
returns a cardinality-minimal set of conditions satisfied by every valid and
violated by every conditional-invalid example.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import engine
from .model import (
    CaptureCondition,
    Cmp,
    Concat,
    Group,
    RegexAst,
    count_groups,
    flatten_concat,
    normalize,
)
from .solver import And, Eq, Ge, Iff, Implies, Le, Ne, Not, Or, SolverHandle, is_true


class CaptureSynthesisError(ValueError):
    pass


class Infeasible(Exception):
    """No condition set separates the examples for this placement."""


def atomic_decompose(ast: RegexAst) -> list[RegexAst]:
    """Smallest sub-regexes whose concatenation rebuilds the regex."""
    if count_groups(ast) != 0:
        raise CaptureSynthesisError("decomposition expects a regex without groups")
    return flatten_concat(normalize(ast))


def recompose(units: list[RegexAst]) -> RegexAst:
    return units[0] if len(units) == 1 else Concat(tuple(units))


def enumerate_placements(decomposition: list[RegexAst], groups: int):
    """All ways to wrap `groups` disjoint contiguous runs of units, in
    lexicographic order of the interval boundaries."""
    n = len(decomposition)
    if groups < 1 or groups > n:
        return

    def intervals(start: int, remaining: int):
        if remaining == 0:
            yield []
            return
        for a in range(start, n - remaining + 1):
            for b in range(a, n - remaining + 1):
                for rest in intervals(b + 1, remaining - 1):
                    yield [(a, b)] + rest

    yield from intervals(0, groups)


def apply_placement(decomposition: list[RegexAst], placement) -> RegexAst:
    units: list[RegexAst] = []
    pos = 0
    for a, b in placement:
        units.extend(decomposition[pos:a])
        inner = decomposition[a : b + 1]
        units.append(Group(recompose(inner)))
        pos = b + 1
    units.extend(decomposition[pos:])
    return recompose(units)


@dataclass(frozen=True)
class CaptureTable:
    """Integer captures of every example under one grouped regex."""

    valid: tuple[tuple[int, ...], ...]
    conditional_invalid: tuple[tuple[int, ...], ...]
    groups: int

    def group_values(self, g: int) -> list[int]:
        vals = [row[g] for row in self.valid]
        vals += [row[g] for row in self.conditional_invalid]
        return vals


def capture_table(regex_with_groups: RegexAst, valid, conditional_invalid) -> CaptureTable:
    """Raises Infeasible when any example fails to match or captures a
    non-integer (the placement is then skipped)."""
    groups = count_groups(regex_with_groups)
    try:
        v = tuple(tuple(engine.extract_captures(regex_with_groups, s)) for s in valid)
        ci = tuple(tuple(engine.extract_captures(regex_with_groups, s)) for s in conditional_invalid)
    except (engine.NoMatch, engine.NonNumericCapture) as exc:
        raise Infeasible(str(exc)) from exc
    return CaptureTable(v, ci, groups)


def condition_domain(groups: int) -> list[tuple[int, Cmp]]:
    """The candidate conditions: each group crossed with both operators."""
    return [(g, op) for g in range(groups) for op in (Cmp.LE, Cmp.GE)]


@dataclass
class ConditionSystem:
    """Solver encoding of one placement's condition synthesis."""

    table: CaptureTable
    handle: SolverHandle
    u_vars: dict
    b_vars: dict

    def bound_window(self, g: int) -> tuple[int, int]:
        vals = self.table.group_values(g)
        return min(vals) - 1, max(vals) + 1


def encode_condition_system(table: CaptureTable, handle: SolverHandle) -> ConditionSystem:
    # declaration order doubles as branching order: usage booleans, then the
    # per-example satisfaction booleans, then the integer bounds (by then the
    # bounds are interval-propagated rather than searched)
    domain = condition_domain(table.groups)
    u_vars = {(g, op): handle.declare_bool(f"u_{g}_{op.name}") for g, op in domain}
    s_vars = {}
    rows = [("v", i, row) for i, row in enumerate(table.valid)]
    rows += [("i", i, row) for i, row in enumerate(table.conditional_invalid)]
    for kind, i, row in rows:
        for g in range(table.groups):
            s_vars[(kind, i, g)] = handle.declare_bool(f"s_{kind}_{i}_{g}")
    b_vars = {}
    for g, op in domain:
        vals = table.group_values(g)
        b_vars[(g, op)] = handle.declare_int(f"b_{g}_{op.name}", min(vals) - 1, max(vals) + 1)

    def smt_atom(g, op, value):
        # the example's capture compared against the condition's bound
        return Le(b_vars[(g, op)], value) if op is Cmp.GE else Ge(b_vars[(g, op)], value)

    for kind, i, row in rows:
        for g in range(table.groups):
            parts = [
                Implies(is_true(u_vars[(g, op)]), smt_atom(g, op, row[g]))
                for op in (Cmp.LE, Cmp.GE)
            ]
            handle.add(Iff(is_true(s_vars[(kind, i, g)]), And(parts)))
    for i, _ in enumerate(table.valid):
        for g in range(table.groups):
            handle.add(is_true(s_vars[("v", i, g)]))
    for i, _ in enumerate(table.conditional_invalid):
        handle.add(Or(tuple(Not(is_true(s_vars[("i", i, g)])) for g in range(table.groups))))
    for g, op in domain:
        handle.add_soft(Not(is_true(u_vars[(g, op)])))
    return ConditionSystem(table, handle, u_vars, b_vars)


def _model_conditions(system: ConditionSystem, model) -> tuple[CaptureCondition, ...]:
    out = []
    for (g, op), u in sorted(system.u_vars.items(), key=lambda kv: (kv[0][0], kv[0][1].name)):
        if model[u] == 1:
            out.append(CaptureCondition(g, op, model[system.b_vars[(g, op)]]))
    return tuple(out)


def synthesize_conditions(
    regex_with_groups: RegexAst, valid, conditional_invalid, handle: SolverHandle
) -> tuple[CaptureCondition, ...]:
    """Cardinality-minimal conditions separating valid from conditional
    invalid examples; raises Infeasible when none exist."""
    table = capture_table(regex_with_groups, valid, conditional_invalid)
    system = encode_condition_system(table, handle)
    got = handle.maximize()
    if got is None:
        raise Infeasible("no condition set separates the examples")
    model, _ = got
    return _model_conditions(system, model)


def enumerate_condition_sets(
    regex_with_groups: RegexAst, valid, conditional_invalid, make_handle, limit: int = 64
):
    """Distinct minimal condition sets for one placement, first the optimum,
    then alternatives found by re-solving with the previous sets blocked.

    Only sets of the optimal cardinality are yielded; bounds range over the
    per-group window [min capture - 1, max capture + 1].
    """
    table = capture_table(regex_with_groups, valid, conditional_invalid)
    handle = make_handle()
    system = encode_condition_system(table, handle)
    got = handle.maximize()
    if got is None:
        raise Infeasible("no condition set separates the examples")
    model, sat = got
    best = _model_conditions(system, model)
    yield best
    optimum = len(best)
    seen = {best}
    for _ in range(limit - 1):
        _block_condition_set(system, handle, seen)
        got = handle.maximize()
        if got is None:
            return
        model, _ = got
        conditions = _model_conditions(system, model)
        if len(conditions) != optimum:
            return
        if conditions in seen:
            return
        seen.add(conditions)
        yield conditions


def _block_condition_set(system: ConditionSystem, handle: SolverHandle, seen):
    for conditions in seen:
        used = {(c.group, c.op): c.bound for c in conditions}
        literals = []
        for key, u in system.u_vars.items():
            if key in used:
                literals.append(Eq(u, 0))
                literals.append(Ne(system.b_vars[key], used[key]))
            else:
                literals.append(Eq(u, 1))
        handle.add(Or(tuple(literals)))


def tighten(conditions, table: CaptureTable) -> tuple[CaptureCondition, ...]:
    """Deterministic bounds: <= takes the largest valid capture, >= the
    smallest."""
    out = []
    for c in conditions:
        vals = [row[c.group] for row in table.valid]
        bound = max(vals) if c.op is Cmp.LE else min(vals)
        out.append(CaptureCondition(c.group, c.op, bound))
    return tuple(out)


# ---------------------------------------------------------------------------
# Condition disambiguation


def distinguish_conditions(
    set1, set2, valid, regex_with_groups: RegexAst, handle: SolverHandle
) -> str | None:
    """A string satisfying the conditions of exactly one set, or None when the
    two sets agree on every capture vector.

    The distinguishing capture values are solved for, then spliced into the
    first valid example (zero-padded to the original captured width); on width
    overflow the next valid example is tried.
    """
    s1, s2 = set(set1), set(set2)
    if s1 == s2:
        return None
    only1 = sorted(s1 - s2, key=lambda c: (c.group, c.op.name, c.bound))
    only2 = sorted(s2 - s1, key=lambda c: (c.group, c.op.name, c.bound))
    groups = count_groups(regex_with_groups)

    bounds = [c.bound for c in only1 + only2]
    lo, hi = min(bounds) - 1, max(bounds) + 1
    c_vars = [handle.declare_int(f"c_{g}", lo, hi) for g in range(groups)]

    def side(conds):
        if not conds:
            return And(())
        return And(
            tuple(
                (Le if c.op is Cmp.LE else Ge)(c_vars[c.group], c.bound)
                for c in conds
            )
        )

    left, right = side(only1), side(only2)
    handle.add(Or((And((left, Not(right))), And((Not(left), right)))))
    model = handle.check()
    if model is None:
        return None
    values = [model[v] for v in c_vars]

    relevant = {c.group for c in only1 + only2}
    last_error = None
    for example in valid:
        try:
            spans = engine.capture_spans(regex_with_groups, example)
        except engine.NoMatch as exc:
            last_error = exc
            continue
        chars = list(example)
        ok = True
        for g in sorted(relevant, reverse=True):
            a, b = spans[g]
            width = b - a
            text = str(values[g]).zfill(width)
            if len(text) != width or values[g] < 0:
                ok = False
                break
            chars[a:b] = list(text)
        if not ok:
            continue
        candidate = "".join(chars)
        if engine.full_match(regex_with_groups, candidate):
            return candidate
        last_error = CaptureSynthesisError(f"spliced string {candidate!r} does not match")
    raise CaptureSynthesisError(
        f"could not materialize a distinguishing string: {last_error}"
    )


def conditions_hold(conditions, regex_with_groups: RegexAst, s: str) -> bool:
    values = engine.extract_captures(regex_with_groups, s)
    return all(c.holds(values[c.group]) for c in conditions)


def brute_force_minimum(table: CaptureTable) -> int | None:
    """Smallest number of conditions separating the examples, by subset
    enumeration with per-type tightest bounds (test oracle)."""
    domain = condition_domain(table.groups)
    for size in range(0, len(domain) + 1):
        for subset in itertools.combinations(domain, size):
            conds = []
            for g, op in subset:
                vals = [row[g] for row in table.valid]
                bound = max(vals) if op is Cmp.LE else min(vals)
                conds.append(CaptureCondition(g, op, bound))
            if all(
                all(c.holds(row[c.group]) for c in conds) for row in table.valid
            ) and all(
                any(not c.holds(row[c.group]) for c in conds)
                for row in table.conditional_invalid
            ):
                return size
    return None
