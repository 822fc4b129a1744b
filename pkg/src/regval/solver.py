"""Constraint backend: variables, hard/soft assertions, check and maximize.

Two interchangeable implementations sit behind the same handle contract:

* `BuiltinSolver` - a self-contained finite-domain engine.  Tree encodings
  (disjunctions of equalities, guarded implications, blocking clauses) run on
  an all-solutions DFS with propagation; anything richer (the capture
  condition systems) runs on a small generic engine with three-valued
  evaluation and interval pruning.  Maximization is a linear search on the
  number of violated soft clauses, which is exactly cardinality-minimal.
* `SmtLibSolver` - SMT-LIB v2 text over a subprocess pipe to any QF_LIA
  solver; integer variables carry explicit bound assertions, and soft clauses
  are lowered onto fresh 0/1 indicator variables with a linear search over
  cardinality bounds.

Model order is deterministic for the builtin engines (declaration order,
ascending values) but consumers must not rely on it.
"""

from __future__ import annotations

import subprocess
import time
from dataclasses import dataclass


class SolverError(Exception):
    pass


class SolverTimeout(SolverError):
    """A check exceeded its time budget (never reported as UNSAT)."""


class SolverFailure(SolverError):
    """The solver process or engine failed."""


DEFAULT_CHECK_TIMEOUT = 10.0


# ---------------------------------------------------------------------------
# Variables and formulas


@dataclass(frozen=True)
class Var:
    name: str
    lo: int
    hi: int
    index: int

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True)
class Eq:
    var: Var
    value: int


@dataclass(frozen=True)
class Ne:
    var: Var
    value: int


@dataclass(frozen=True)
class Le:
    var: Var
    value: int


@dataclass(frozen=True)
class Ge:
    var: Var
    value: int


@dataclass(frozen=True)
class VarNe:
    a: Var
    b: Var


@dataclass(frozen=True)
class Not:
    f: object


@dataclass(frozen=True)
class And:
    parts: tuple

    def __init__(self, parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __init__(self, parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Implies:
    a: object
    b: object


@dataclass(frozen=True)
class Iff:
    a: object
    b: object


def is_true(var: Var) -> Eq:
    return Eq(var, 1)


def is_false(var: Var) -> Eq:
    return Eq(var, 0)


# ---------------------------------------------------------------------------
# Handle contract


class SolverHandle:
    """One single-threaded solving session.

    After a blocking clause for a model is asserted, that model is never
    returned again within the same scope.
    """

    def declare_int(self, name: str, lo: int, hi: int) -> Var:
        raise NotImplementedError

    def declare_bool(self, name: str) -> Var:
        return self.declare_int(name, 0, 1)

    def add(self, formula) -> None:
        raise NotImplementedError

    def add_soft(self, formula) -> None:
        raise NotImplementedError

    def block_assignment(self, pairs) -> None:
        """Forbid the partial assignment {var: value, ...}."""
        raise NotImplementedError

    def check(self) -> dict | None:
        raise NotImplementedError

    def maximize(self) -> tuple[dict, int] | None:
        raise NotImplementedError

    def push(self) -> None:
        raise NotImplementedError

    def pop(self) -> None:
        raise NotImplementedError

    def close(self) -> None:
        pass


# ---------------------------------------------------------------------------
# Builtin finite-domain engine


def _mask_of(values) -> int:
    mask = 0
    for v in values:
        mask |= 1 << v
    return mask


class _EnumEngine:
    """All-solutions DFS over integer variables with bitmask domains.

    Constraint forms: unary domain restrictions, guarded implications
    (var=val -> target in set), multi-variable clauses (OR of var-in-set
    literals), partial-assignment nogoods and guarded subtree-difference
    disjunctions.  Variables are assigned in index order; nogoods and
    difference constraints are checked when their deepest variable is
    assigned, which with in-order assignment is exactly when they become
    fully determined.
    """

    def __init__(self, n_vars: int, domains: list[int]):
        self.n = n_vars
        self.domains = list(domains)
        self.guards: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self.clauses: list[list[tuple[int, int]]] = []
        self.clause_by_var: dict[int, list[int]] = {}
        self.nogood_by_trigger: dict[tuple[int, int], list[list[tuple[int, int]]]] = {}
        self.diff_by_maxvar: dict[int, list[tuple[int, int, list[tuple[int, int]]]]] = {}
        self.deadline: float | None = None
        self._nodes = 0
        self._next_check = 2048
        self._fresh_nogoods: list[list[tuple[int, int]]] = []
        self._nogood_seen: set = set()
        self._running = False

    def restrict(self, var: int, mask: int):
        self.domains[var] &= mask

    def add_guard(self, var: int, value: int, target: int, mask: int):
        self.guards.setdefault((var, value), []).append((target, mask))

    def add_clause(self, literals: list[tuple[int, int]]):
        cid = len(self.clauses)
        self.clauses.append(sorted(literals))
        for v, _ in literals:
            self.clause_by_var.setdefault(v, []).append(cid)

    def add_nogood(self, pairs: list[tuple[int, int]]):
        pairs = sorted(pairs)
        key = tuple(pairs)
        if key in self._nogood_seen:
            return
        self._nogood_seen.add(key)
        trigger = pairs[-1]
        self.nogood_by_trigger.setdefault(trigger, []).append(pairs)
        if self._running:
            self._fresh_nogoods.append(pairs)

    def add_diff(self, trigger_var: int, trigger_val: int, pairs: list[tuple[int, int]]):
        maxvar = max(trigger_var, max(max(a, b) for a, b in pairs))
        self.diff_by_maxvar.setdefault(maxvar, []).append((trigger_var, trigger_val, pairs))

    def _tick(self):
        self._nodes += 1
        if self._nodes >= self._next_check:
            self._next_check = self._nodes + 2048
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise SolverTimeout("enumeration check exceeded its time budget")

    def solutions(self):
        self._running = True
        V = self.n
        if V == 0:
            yield []
            return
        doms = [None] * (V + 1)
        sats = [0] * (V + 1)
        rem = [0] * V
        assignment = [0] * V
        doms[0] = list(self.domains)
        if any(d == 0 for d in doms[0]):
            return
        rem[0] = doms[0][0]
        depth = 0
        while depth >= 0:
            self._tick()
            if depth == V:
                yield list(assignment)
                depth -= 1
                if self._fresh_nogoods:
                    depth = self._apply_fresh(assignment, depth)
                continue
            mask = rem[depth]
            if mask == 0:
                depth -= 1
                continue
            low = mask & -mask
            rem[depth] = mask ^ low
            val = low.bit_length() - 1
            assignment[depth] = val

            nxt = list(doms[depth])
            nxt[depth] = low
            if not self._consistent(depth, val, assignment, nxt, sats, depth):
                continue
            doms[depth + 1] = nxt
            depth += 1
            if depth < V:
                rem[depth] = doms[depth][depth]

    def _apply_fresh(self, assignment, depth):
        """Backjump past any freshly injected nogood the current path matches."""
        target = depth
        for pairs in self._fresh_nogoods:
            if all(assignment[v] == val for v, val in pairs):
                target = min(target, pairs[-1][0])
        self._fresh_nogoods = []
        return target

    def _consistent(self, var, val, assignment, doms_next, sats, depth) -> bool:
        for target, mask in self.guards.get((var, val), ()):
            if target < var:
                if not (1 << assignment[target]) & mask:
                    return False
            else:
                nd = doms_next[target] & mask
                if nd == 0:
                    return False
                doms_next[target] = nd
        sat = sats[depth]
        for cid in self.clause_by_var.get(var, ()):
            bit = 1 << cid
            if sat & bit:
                continue
            satisfied = False
            active = []
            for v, mask in self.clauses[cid]:
                if v <= var:
                    if (1 << assignment[v]) & mask:
                        satisfied = True
                        break
                elif doms_next[v] & mask:
                    active.append((v, mask))
            if satisfied:
                sat |= bit
            elif not active:
                return False
            elif len(active) == 1:
                v, mask = active[0]
                doms_next[v] &= mask
        for pairs in self.nogood_by_trigger.get((var, val), ()):
            if all(assignment[v] == w for v, w in pairs[:-1]):
                return False
        for trig_var, trig_val, pairs in self.diff_by_maxvar.get(var, ()):
            if assignment[trig_var] != trig_val:
                continue
            if all(assignment[a] == assignment[b] for a, b in pairs):
                return False
        sats[depth + 1] = sat
        return True


class _GenericEngine:
    """Small search over mixed boolean/integer variables with three-valued
    evaluation, used for the capture-condition systems."""

    def __init__(self, variables: list[Var], hard: list, soft: list):
        self.vars = variables
        self.hard = list(hard)
        self.soft = list(soft)
        self.deadline: float | None = None
        self._touch: dict[int, list] = {}
        for f in self.hard:
            for v in _formula_vars(f):
                self._touch.setdefault(v.index, []).append(f)

    # --- three-valued evaluation over domain tuples -----------------------

    def _eval(self, f, dom) -> bool | None:
        if isinstance(f, Eq):
            d = dom[f.var.index]
            if f.value not in d:
                return False
            return True if len(d) == 1 else None
        if isinstance(f, Ne):
            d = dom[f.var.index]
            if f.value not in d:
                return True
            return False if len(d) == 1 else None
        if isinstance(f, Le):
            d = dom[f.var.index]
            if d[-1] <= f.value:
                return True
            if d[0] > f.value:
                return False
            return None
        if isinstance(f, Ge):
            d = dom[f.var.index]
            if d[0] >= f.value:
                return True
            if d[-1] < f.value:
                return False
            return None
        if isinstance(f, VarNe):
            da, db = dom[f.a.index], dom[f.b.index]
            if len(da) == 1 and len(db) == 1:
                return da[0] != db[0]
            if da[-1] < db[0] or db[-1] < da[0]:
                return True
            return None
        if isinstance(f, Not):
            v = self._eval(f.f, dom)
            return None if v is None else not v
        if isinstance(f, And):
            out = True
            for p in f.parts:
                v = self._eval(p, dom)
                if v is False:
                    return False
                if v is None:
                    out = None
            return out
        if isinstance(f, Or):
            out = False
            for p in f.parts:
                v = self._eval(p, dom)
                if v is True:
                    return True
                if v is None:
                    out = None
            return out
        if isinstance(f, Implies):
            return self._eval(Or((Not(f.a), f.b)), dom)
        if isinstance(f, Iff):
            va, vb = self._eval(f.a, dom), self._eval(f.b, dom)
            if va is None or vb is None:
                return None
            return va == vb
        raise SolverFailure(f"cannot evaluate formula {f!r}")

    def _force(self, f, want: bool, dom) -> bool:
        """Narrow domains so that `f` evaluates to `want`; False on wipeout."""
        if isinstance(f, Eq):
            d = dom[f.var.index]
            nd = tuple(x for x in d if (x == f.value) == want)
            if not nd:
                return False
            dom[f.var.index] = nd
            return True
        if isinstance(f, Ne):
            return self._force(Eq(f.var, f.value), not want, dom)
        if isinstance(f, Le):
            d = dom[f.var.index]
            nd = tuple(x for x in d if (x <= f.value) == want)
            if not nd:
                return False
            dom[f.var.index] = nd
            return True
        if isinstance(f, Ge):
            d = dom[f.var.index]
            nd = tuple(x for x in d if (x >= f.value) == want)
            if not nd:
                return False
            dom[f.var.index] = nd
            return True
        if isinstance(f, Not):
            return self._force(f.f, not want, dom)
        if isinstance(f, And) and want:
            return all(self._force(p, True, dom) for p in f.parts)
        if isinstance(f, Or) and not want:
            return all(self._force(p, False, dom) for p in f.parts)
        if isinstance(f, (And, Or)):
            # one undecided disjunct/conjunct left: it decides the formula
            settled = want if isinstance(f, Or) else not want
            undecided = []
            for p in f.parts:
                v = self._eval(p, dom)
                if v is settled:
                    return True
                if v is None:
                    undecided.append(p)
            if not undecided:
                return False
            if len(undecided) == 1:
                return self._force(undecided[0], settled, dom)
            return True
        if isinstance(f, Implies):
            return self._force(Or((Not(f.a), f.b)), want, dom)
        if isinstance(f, Iff):
            va = self._eval(f.a, dom)
            if va is not None:
                return self._force(f.b, va == want, dom)
            vb = self._eval(f.b, dom)
            if vb is not None:
                return self._force(f.a, vb == want, dom)
            return True
        if isinstance(f, VarNe):
            return True  # no useful narrowing short of search
        raise SolverFailure(f"cannot propagate formula {f!r}")

    def _propagate(self, dom) -> bool:
        changed = True
        while changed:
            changed = False
            before = list(dom)
            for f in self.hard:
                v = self._eval(f, dom)
                if v is False:
                    return False
                if v is None and not self._force(f, True, dom):
                    return False
            if dom != before:
                changed = True
        return True

    def _search(self, dom, idx, max_violations, counter):
        counter[0] += 1
        if counter[0] % 256 == 0 and self.deadline is not None:
            if time.monotonic() > self.deadline:
                raise SolverTimeout("generic check exceeded its time budget")
        if self.soft:
            definite = sum(1 for f in self.soft if self._eval(f, dom) is False)
            if definite > max_violations:
                return None
        while idx < len(self.vars) and len(dom[self.vars[idx].index]) == 1:
            idx += 1
        if idx == len(self.vars):
            model = {v: dom[v.index][0] for v in self.vars}
            for f in self.hard:
                if self._eval(f, dom) is not True:
                    return None
            return model
        var = self.vars[idx]
        for value in dom[var.index]:
            trial = list(dom)
            trial[var.index] = (value,)
            if not self._propagate(trial):
                continue
            found = self._search(trial, idx + 1, max_violations, counter)
            if found is not None:
                return found
        return None

    def initial_domains(self):
        return [tuple(range(v.lo, v.hi + 1)) for v in sorted(self.vars, key=lambda v: v.index)]

    def check(self) -> dict | None:
        dom = self.initial_domains()
        if not self._propagate(dom):
            return None
        return self._search(dom, 0, len(self.soft), [0])

    def maximize(self) -> tuple[dict, int] | None:
        base = self.initial_domains()
        if not self._propagate(list(base)):
            return None
        for violations in range(len(self.soft) + 1):
            dom = list(base)
            if not self._propagate(dom):
                return None
            model = self._search(dom, 0, violations, [0])
            if model is not None:
                sat = sum(1 for f in self.soft if self._eval_model(f, model))
                return model, sat
        return None

    def _eval_model(self, f, model) -> bool:
        dom = [None] * (max(v.index for v in self.vars) + 1)
        for v in self.vars:
            dom[v.index] = (model[v],)
        return self._eval(f, dom) is True


def _formula_vars(f):
    if isinstance(f, (Eq, Ne, Le, Ge)):
        return [f.var]
    if isinstance(f, VarNe):
        return [f.a, f.b]
    if isinstance(f, Not):
        return _formula_vars(f.f)
    if isinstance(f, (And, Or)):
        out = []
        for p in f.parts:
            out.extend(_formula_vars(p))
        return out
    if isinstance(f, (Implies, Iff)):
        return _formula_vars(f.a) + _formula_vars(f.b)
    return []


class BuiltinSolver(SolverHandle):
    """Default backend: no external process, deterministic models."""

    def __init__(self, check_timeout: float = DEFAULT_CHECK_TIMEOUT):
        self.check_timeout = check_timeout
        self.variables: list[Var] = []
        self.hard: list = []
        self.soft: list = []
        self.nogoods: list[list[tuple[Var, int]]] = []
        self._scopes: list[tuple[int, int, int]] = []
        self._engine: _EnumEngine | None = None
        self._stream = None
        self._last_model: dict | None = None
        self._last_blocked = True

    # --- declarations and assertions --------------------------------------

    def declare_int(self, name: str, lo: int, hi: int) -> Var:
        if lo > hi:
            raise SolverFailure(f"empty domain for {name}")
        var = Var(name, lo, hi, len(self.variables))
        self.variables.append(var)
        self._invalidate()
        return var

    def add(self, formula) -> None:
        self.hard.append(formula)
        self._invalidate()

    def add_soft(self, formula) -> None:
        self.soft.append(formula)
        self._invalidate()

    def block_assignment(self, pairs) -> None:
        pairs = list(pairs.items()) if isinstance(pairs, dict) else list(pairs)
        if self._engine is not None and self._stream is not None:
            if self._last_model is not None and not self._last_blocked:
                if all(self._last_model.get(v) == val for v, val in pairs) and len(pairs) == len(
                    self.variables
                ):
                    # blocking exactly the model just returned: the stream
                    # never revisits it, so advancing is enough
                    self._last_blocked = True
                    return
            self._engine.add_nogood([(v.index, val) for v, val in pairs])
            self.nogoods.append(pairs)
            return
        self.nogoods.append(pairs)

    def push(self) -> None:
        self._scopes.append((len(self.hard), len(self.soft), len(self.nogoods)))

    def pop(self) -> None:
        if not self._scopes:
            raise SolverFailure("pop without matching push")
        h, s, n = self._scopes.pop()
        del self.hard[h:]
        del self.soft[s:]
        del self.nogoods[n:]
        self._invalidate()

    def _invalidate(self):
        self._engine = None
        self._stream = None
        self._last_model = None
        self._last_blocked = True

    # --- solving -----------------------------------------------------------

    def check(self) -> dict | None:
        deadline = time.monotonic() + self.check_timeout
        if self.soft or not self._enum_compatible():
            engine = self._generic()
            engine.deadline = deadline
            return engine.check()
        if self._engine is None:
            self._build_enum()
        if self._last_model is not None and not self._last_blocked:
            return dict(self._last_model)
        self._engine.deadline = deadline
        try:
            values = next(self._stream)
        except StopIteration:
            return None
        model = {v: values[v.index] for v in self.variables}
        self._last_model = model
        self._last_blocked = False
        return dict(model)

    def maximize(self) -> tuple[dict, int] | None:
        engine = self._generic()
        engine.deadline = time.monotonic() + self.check_timeout
        return engine.maximize()

    # --- compilation -------------------------------------------------------

    def _enum_compatible(self) -> bool:
        return all(self._compile_probe(f) for f in self.hard)

    def _compile_probe(self, f) -> bool:
        kind = _classify(f)
        return kind is not None

    def _build_enum(self):
        for var in self.variables:
            if var.lo < 0:
                raise SolverFailure("enum engine requires non-negative domains")
        engine = _EnumEngine(
            len(self.variables),
            [_mask_of(range(v.lo, v.hi + 1)) for v in self.variables],
        )
        for f in self.hard:
            kind = _classify(f)
            if kind is None:
                raise SolverFailure(f"formula not enum-compatible: {f!r}")
            tag = kind[0]
            if tag == "domain":
                _, var, mask = kind
                engine.restrict(var.index, mask)
            elif tag == "guard":
                _, var, val, targets = kind
                for tvar, mask in targets:
                    engine.add_guard(var.index, val, tvar.index, mask)
            elif tag == "clause":
                _, literals = kind
                engine.add_clause([(v.index, m) for v, m in literals])
            elif tag == "diff":
                _, var, val, pairs = kind
                engine.add_diff(var.index, val, [(a.index, b.index) for a, b in pairs])
        for pairs in self.nogoods:
            engine.add_nogood([(v.index, val) for v, val in pairs])
        self._engine = engine
        self._stream = engine.solutions()
        self._last_model = None
        self._last_blocked = True

    def _generic(self) -> _GenericEngine:
        hard = list(self.hard)
        for pairs in self.nogoods:
            hard.append(Or(tuple(Ne(v, val) for v, val in pairs)))
        return _GenericEngine(list(self.variables), hard, list(self.soft))


# --- classification of enum-compatible formulas ----------------------------


def _in_set(f) -> tuple[Var, int] | None:
    """Match a single-variable membership formula, returning (var, mask)."""
    if isinstance(f, Eq):
        return f.var, 1 << f.value
    if isinstance(f, Ne):
        full = _mask_of(range(f.var.lo, f.var.hi + 1))
        return f.var, full & ~(1 << f.value)
    if isinstance(f, Or):
        var = None
        mask = 0
        for p in f.parts:
            if not isinstance(p, Eq):
                return None
            if var is None:
                var = p.var
            elif var is not p.var and var != p.var:
                return None
            mask |= 1 << p.value
        if var is None:
            return None
        return var, mask
    if isinstance(f, And):
        var = None
        full = None
        for p in f.parts:
            got = _in_set(p)
            if got is None:
                return None
            v, m = got
            if var is None:
                var, full = v, m
            elif v != var:
                return None
            else:
                full &= m
        if var is None:
            return None
        return var, full
    return None


def _classify(f):
    got = _in_set(f)
    if got is not None:
        return ("domain", got[0], got[1])
    if isinstance(f, Or):
        literals = []
        for p in f.parts:
            got = _in_set(p)
            if got is None:
                break
            literals.append(got)
        else:
            by_var: dict[Var, int] = {}
            for v, m in literals:
                by_var[v] = by_var.get(v, 0) | m
            return ("clause", list(by_var.items()))
    if isinstance(f, Implies) and isinstance(f.a, Eq):
        body = f.b.parts if isinstance(f.b, And) else (f.b,)
        targets = []
        diff_pairs = []
        for part in body:
            got = _in_set(part)
            if got is not None:
                targets.append(got)
                continue
            if isinstance(part, Or) and all(isinstance(q, VarNe) for q in part.parts):
                diff_pairs.extend((q.a, q.b) for q in part.parts)
                continue
            if isinstance(part, VarNe):
                diff_pairs.append((part.a, part.b))
                continue
            return None
        if diff_pairs and targets:
            return None  # mixed body: keep the encoding simple, fall back
        if diff_pairs:
            return ("diff", f.a.var, f.a.value, diff_pairs)
        return ("guard", f.a.var, f.a.value, targets)
    return None


# ---------------------------------------------------------------------------
# SMT-LIB v2 subprocess backend


def formula_to_smtlib(f) -> str:
    if isinstance(f, Eq):
        return f"(= {f.var.name} {_smt_int(f.value)})"
    if isinstance(f, Ne):
        return f"(not (= {f.var.name} {_smt_int(f.value)}))"
    if isinstance(f, Le):
        return f"(<= {f.var.name} {_smt_int(f.value)})"
    if isinstance(f, Ge):
        return f"(>= {f.var.name} {_smt_int(f.value)})"
    if isinstance(f, VarNe):
        return f"(not (= {f.a.name} {f.b.name}))"
    if isinstance(f, Not):
        return f"(not {formula_to_smtlib(f.f)})"
    if isinstance(f, And):
        if not f.parts:
            return "true"
        return "(and " + " ".join(formula_to_smtlib(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        if not f.parts:
            return "false"
        return "(or " + " ".join(formula_to_smtlib(p) for p in f.parts) + ")"
    if isinstance(f, Implies):
        return f"(=> {formula_to_smtlib(f.a)} {formula_to_smtlib(f.b)})"
    if isinstance(f, Iff):
        return f"(= {formula_to_smtlib(f.a)} {formula_to_smtlib(f.b)})"
    raise SolverFailure(f"cannot serialize formula {f!r}")


def _smt_int(value: int) -> str:
    return str(value) if value >= 0 else f"(- {-value})"


def parse_value_response(text: str) -> dict[str, int]:
    """Parse a `(get-value ...)` response such as `((x 3) (y (- 2)))`."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()

    def read(pos):
        if tokens[pos] != "(":
            return tokens[pos], pos + 1
        out = []
        pos += 1
        while tokens[pos] != ")":
            item, pos = read(pos)
            out.append(item)
        return out, pos + 1

    tree, _ = read(0)
    values: dict[str, int] = {}
    for entry in tree:
        name, value = entry[0], entry[1]
        if isinstance(value, list):
            if len(value) == 2 and value[0] == "-":
                value = -int(value[1])
            else:
                raise SolverFailure(f"cannot parse model value {value!r}")
        else:
            value = int(value)
        values[name] = value
    return values


class SmtLibSolver(SolverHandle):
    """Backend speaking SMT-LIB v2 to a solver binary over a pipe."""

    def __init__(self, command, check_timeout: float = DEFAULT_CHECK_TIMEOUT):
        if isinstance(command, str):
            command = command.split()
        self.command = list(command)
        self.check_timeout = check_timeout
        self.variables: list[Var] = []
        try:
            self.proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise SolverFailure(f"cannot start solver {self.command}: {exc}") from exc
        self._send("(set-option :produce-models true)")
        self._send("(set-logic QF_LIA)")
        self._soft: list = []

    def _send(self, line: str):
        if self.proc.poll() is not None:
            raise SolverFailure("solver process exited")
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except BrokenPipeError as exc:
            raise SolverFailure("solver pipe broken") from exc

    def _read_line(self, deadline: float) -> str:
        import select

        while True:
            if time.monotonic() > deadline:
                self.proc.kill()
                raise SolverTimeout("solver did not answer in time")
            ready, _, _ = select.select([self.proc.stdout], [], [], 0.05)
            if ready:
                line = self.proc.stdout.readline()
                if line == "":
                    raise SolverFailure("solver closed its output")
                line = line.strip()
                if line:
                    return line

    def _read_sexpr(self, deadline: float) -> str:
        buf = ""
        while True:
            buf += (" " if buf else "") + self._read_line(deadline)
            if buf.count("(") <= buf.count(")"):
                return buf

    def declare_int(self, name: str, lo: int, hi: int) -> Var:
        var = Var(name, lo, hi, len(self.variables))
        self.variables.append(var)
        self._send(f"(declare-const {name} Int)")
        self._send(f"(assert (and (>= {name} {_smt_int(lo)}) (<= {name} {_smt_int(hi)})))")
        return var

    def add(self, formula) -> None:
        self._send(f"(assert {formula_to_smtlib(formula)})")

    def add_soft(self, formula) -> None:
        self._soft.append(formula)

    def block_assignment(self, pairs) -> None:
        pairs = list(pairs.items()) if isinstance(pairs, dict) else list(pairs)
        self.add(Or(tuple(Ne(v, val) for v, val in pairs)))

    def push(self) -> None:
        self._send("(push 1)")

    def pop(self) -> None:
        self._send("(pop 1)")

    def _check_sat(self, deadline: float) -> bool:
        self._send("(check-sat)")
        answer = self._read_line(deadline)
        if answer == "sat":
            return True
        if answer == "unsat":
            return False
        if answer == "unknown":
            raise SolverTimeout("solver answered unknown")
        raise SolverFailure(f"unexpected solver answer {answer!r}")

    def _model(self, deadline: float) -> dict:
        names = " ".join(v.name for v in self.variables)
        self._send(f"(get-value ({names}))")
        values = parse_value_response(self._read_sexpr(deadline))
        return {v: values[v.name] for v in self.variables}

    def check(self) -> dict | None:
        deadline = time.monotonic() + self.check_timeout
        if not self._check_sat(deadline):
            return None
        return self._model(deadline)

    def maximize(self) -> tuple[dict, int] | None:
        # linear search over cardinality bounds on fresh indicator variables
        deadline = time.monotonic() + self.check_timeout
        indicators = []
        for i, f in enumerate(self._soft):
            ind = self.declare_int(f"__soft_{i}", 0, 1)
            self.add(Implies(Eq(ind, 1), f))
            indicators.append(ind)
        total = "(+ " + " ".join(v.name for v in indicators) + ")" if indicators else "0"
        for k in range(len(self._soft), -1, -1):
            self.push()
            if indicators:
                self._send(f"(assert (>= {total} {k}))")
            if self._check_sat(deadline):
                model = self._model(deadline)
                self.pop()
                for ind in indicators:
                    model.pop(ind, None)
                return model, k
            self.pop()
        return None

    def close(self) -> None:
        try:
            self._send("(exit)")
        except SolverError:
            pass
        self.proc.kill()


def open_solver(path: str | None = None, check_timeout: float = DEFAULT_CHECK_TIMEOUT) -> SolverHandle:
    """Open the configured backend: an SMT-LIB process when a path is given
    (or the REGVAL_SOLVER environment variable is set), else the builtin."""
    import os

    command = path or os.environ.get("REGVAL_SOLVER")
    if command:
        return SmtLibSolver(command, check_timeout)
    return BuiltinSolver(check_timeout)
