"""Two-stage interactive synthesis: regex search, then capture conditions.

Stage one enumerates multi-tree programs (static per-field when the examples
split on dividing substrings, dynamic otherwise), verifies them against the
examples, and disambiguates verifying candidates pairwise with distinguishing
inputs.  After the first verifying candidate, enumeration continues to the
end of the current shape and then settles on the surviving incumbent.  Stage
two runs when conditional-invalid examples are present: capturing-group
placements are tried in increasing group count, each with a cardinality-
minimal condition solve and its own disambiguation loop.

The control flow is a generator that yields questions and receives boolean
answers, so both blocking front ends (CLI, HTTP service) and step-driven
tests share one code path.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace

from . import captures as cap
from . import engine, splitter
from .dsl import CLASS_MEMBERS, build_dsl
from .enumerator import (
    EncodingError,
    TreeEncoding,
    TreeShape,
    dynamic_shapes,
    static_shapes,
)
from .model import (
    CharLiteral,
    Concat,
    ExampleSet,
    RegexAst,
    RegexValidation,
    normalize,
    validate,
)
from .solver import BuiltinSolver, SmtLibSolver, SolverError, SolverTimeout

logger = logging.getLogger("regval")


@dataclass
class SynthesisConfig:
    mode: str = "multitree"  # "multitree" | "ktree"
    split: bool = True
    pruning: bool = True
    depth_limit: int = 6
    node_limit: int = 40
    per_shape_cap: int = 100_000
    atom_cap: int = 20_000
    question_cap: int = 20
    placement_group_cap: int = 4
    condition_alternative_cap: int = 64
    timeout: float = 3600.0
    check_timeout: float = 10.0
    solver_path: str | None = None

    def make_handle(self):
        if self.solver_path:
            return SmtLibSolver(self.solver_path, self.check_timeout)
        return BuiltinSolver(self.check_timeout)


@dataclass
class Stats:
    programs_enumerated: int = 0
    assemblies_checked: int = 0
    equivalent_dropped: int = 0
    questions: int = 0
    shapes_visited: int = 0
    seconds: float = 0.0
    strategy: str = ""

    def as_dict(self) -> dict:
        return {
            "programs_enumerated": self.programs_enumerated,
            "assemblies_checked": self.assemblies_checked,
            "equivalent_dropped": self.equivalent_dropped,
            "questions": self.questions,
            "shapes_visited": self.shapes_visited,
            "seconds": round(self.seconds, 3),
            "strategy": self.strategy,
        }


PHASE_REGEX_SEARCH = "regex_search"
PHASE_REGEX_DISAMBIGUATION = "regex_disambiguation"
PHASE_CAPTURE_SEARCH = "capture_search"
PHASE_CAPTURE_DISAMBIGUATION = "capture_disambiguation"
PHASE_DONE = "done"
PHASE_FAILED = "failed"


@dataclass(frozen=True)
class Question:
    text: str
    phase: str  # "regex" | "captures"


class SessionError(RuntimeError):
    pass


@dataclass
class SynthesisSession:
    """Mutable state of one synthesis run."""

    config: SynthesisConfig
    valid: list[str]
    invalid: list[str]
    conditional_invalid: list[str]
    phase: str = PHASE_REGEX_SEARCH
    pending_question: Question | None = None
    result: RegexValidation | None = None
    best_regex: RegexAst | None = None
    failure: str | None = None
    best_effort: bool = False
    stats: Stats = field(default_factory=Stats)
    transcript: list = field(default_factory=list)
    alphabet: engine.SessionAlphabet | None = None
    _deadline: float = 0.0
    _question_budget_spent: bool = False

    @classmethod
    def create(cls, examples: ExampleSet, config: SynthesisConfig | None = None):
        config = config or SynthesisConfig()
        session = cls(
            config=config,
            valid=list(examples.valid),
            invalid=list(examples.invalid),
            conditional_invalid=list(examples.conditional_invalid),
        )
        dsl = build_dsl(session.valid)
        strings = session.valid + session.invalid + session.conditional_invalid
        session.alphabet = engine.build_session_alphabet(strings, dsl.classes)
        return session

    @property
    def done(self) -> bool:
        return self.phase in (PHASE_DONE, PHASE_FAILED)

    def example_set(self) -> ExampleSet:
        return ExampleSet(tuple(self.valid), tuple(self.invalid), tuple(self.conditional_invalid))

    def timed_out(self) -> bool:
        return time.monotonic() > self._deadline


# ---------------------------------------------------------------------------
# Answer oracles


class AnswerOracle:
    """Classifies distinguishing inputs as valid/invalid; None aborts."""

    interactive = True

    def answer(self, question: Question, session: SynthesisSession) -> bool | None:
        raise NotImplementedError


class AcceptFirstOracle(AnswerOracle):
    """Never asks: the first verifying solution is kept."""

    interactive = False

    def answer(self, question, session):
        raise SessionError("accept-first oracle should never be asked")


class GroundTruthOracle(AnswerOracle):
    """Answers from a hidden reference validation: pattern questions by the
    reference regex alone, value questions by regex plus conditions."""

    def __init__(self, truth: RegexValidation):
        self.truth = truth

    def answer(self, question: Question, session) -> bool:
        matches = engine.full_match(self.truth.regex, question.text)
        if question.phase == "regex":
            return matches
        if not matches:
            return False
        try:
            values = engine.extract_captures(self.truth.regex, question.text)
        except engine.NonNumericCapture:
            return not self.truth.conditions
        return all(c.holds(values[c.group]) for c in self.truth.conditions)


class CallbackOracle(AnswerOracle):
    def __init__(self, fn):
        self.fn = fn

    def answer(self, question, session):
        return self.fn(question, session)


# ---------------------------------------------------------------------------
# Step-driven driver and the blocking entry point


class SessionDriver:
    """Runs the synthesis generator until it needs an answer or finishes."""

    def __init__(self, examples: ExampleSet, config: SynthesisConfig | None = None,
                 interactive: bool = True, autostart: bool = True):
        self.session = SynthesisSession.create(examples, config)
        self._interactive = interactive
        self._started = False
        self._gen = None
        self._t0 = 0.0
        if autostart:
            self.start()

    def start(self) -> None:
        if self._started:
            return
        self._started = True
        self.session._deadline = time.monotonic() + self.session.config.timeout
        self._t0 = time.monotonic()
        self._gen = _synthesis(self.session, self._interactive)
        self._advance(None)

    def _advance(self, value):
        session = self.session
        try:
            if value is None:
                question = next(self._gen)
            else:
                question = self._gen.send(value)
            session.pending_question = question
            session.phase = (
                PHASE_REGEX_DISAMBIGUATION
                if question.phase == "regex"
                else PHASE_CAPTURE_DISAMBIGUATION
            )
        except StopIteration:
            session.pending_question = None
        finally:
            session.stats.seconds = time.monotonic() - self._t0

    def pending(self) -> Question | None:
        return self.session.pending_question

    def answer(self, is_valid: bool) -> None:
        """Feed the pending question's answer and resume enumeration."""
        session = self.session
        if session.pending_question is None:
            raise SessionError("no pending question to answer")
        question = session.pending_question
        session.pending_question = None
        session.phase = (
            PHASE_REGEX_SEARCH if question.phase == "regex" else PHASE_CAPTURE_SEARCH
        )
        session.transcript.append((question, bool(is_valid)))
        session.stats.questions += 1
        self._advance(bool(is_valid))

    def abort(self, reason: str = "aborted") -> None:
        self._gen.close()
        _fail(self.session, reason)


def run(examples: ExampleSet, config: SynthesisConfig | None = None,
        oracle: AnswerOracle | None = None) -> SynthesisSession:
    """Blocking run: every question is answered by the oracle."""
    oracle = oracle or AcceptFirstOracle()
    driver = SessionDriver(examples, config, interactive=oracle.interactive)
    while driver.pending() is not None:
        answer = oracle.answer(driver.pending(), driver.session)
        if answer is None:
            driver.abort()
            break
        driver.answer(answer)
    return driver.session


# ---------------------------------------------------------------------------
# The synthesis generator


def _fail(session: SynthesisSession, reason: str):
    session.phase = PHASE_FAILED
    session.failure = reason
    logger.info("synthesis failed: %s", reason)


def _synthesis(session: SynthesisSession, interactive: bool):
    config = session.config
    best = yield from _stage_one(session, interactive)
    if best is None:
        if session.best_regex is not None:
            session.best_effort = True
            session.result = RegexValidation(session.best_regex, ())
            session.phase = PHASE_DONE
        elif session.failure is None:
            _fail(session, "no regex consistent with the examples within the budgets")
        return
    session.best_regex = best
    if session.conditional_invalid:
        session.phase = PHASE_CAPTURE_SEARCH
        result = yield from _stage_two(session, best, interactive)
        if result is None:
            if session.failure is None and session.best_effort:
                session.result = RegexValidation(best, ())
                session.phase = PHASE_DONE
            return
    else:
        result = RegexValidation(best, ())
    session.result = result
    session.phase = PHASE_DONE
    report = validate(result, session.example_set())
    if not report.ok:
        _fail(session, "internal: result does not validate against the final examples")


def _stage_one(session: SynthesisSession, interactive: bool):
    config = session.config
    session.phase = PHASE_REGEX_SEARCH
    if config.mode == "ktree":
        session.stats.strategy = "ktree"
        dsl = _thin_dsl(build_dsl(session.valid), session.alphabet)
        return (
            yield from _joint_search(
                session, dsl, static_shapes(1, config.depth_limit), interactive
            )
        )
    if config.split:
        sp = splitter.split(session.valid, session.invalid)
        if sp.did_split:
            session.stats.strategy = "static"
            best = yield from _static_search(session, sp, interactive)
            if best is not None or session.done or session.timed_out():
                return best
            logger.info("static search exhausted; falling back to dynamic")
    session.stats.strategy = (session.stats.strategy + "+dynamic").lstrip("+")
    dsl = _thin_dsl(build_dsl(session.valid), session.alphabet)
    return (
        yield from _joint_search(
            session, dsl, dynamic_shapes(config.node_limit, config.depth_limit), interactive
        )
    )


class _Pool:
    """Single-incumbent candidate pool with pairwise disambiguation."""

    def __init__(self, session: SynthesisSession, interactive: bool):
        self.session = session
        self.interactive = interactive
        self.incumbent_ast: RegexAst | None = None
        self.incumbent_key = None

    def offer(self, ast: RegexAst):
        """Generator: may yield one question.  Returns True when the offer
        settled the search immediately (accept-first mode)."""
        session = self.session
        if self.incumbent_ast is None:
            self.incumbent_ast = ast
            self.incumbent_key = engine.language_key(ast, session.alphabet)
            logger.info("candidate: %s", engine.emit(ast))
            return not self.interactive
        key = engine.language_key(ast, session.alphabet)
        if key == self.incumbent_key:
            session.stats.equivalent_dropped += 1
            return False
        if session.stats.questions >= session.config.question_cap:
            session._question_budget_spent = True
            return False
        witness = engine.distinguishing_input(self.incumbent_ast, ast, session.alphabet)
        if witness is None:
            session.stats.equivalent_dropped += 1
            return False
        is_valid = yield Question(witness, "regex")
        if is_valid:
            session.valid.append(witness)
        else:
            session.invalid.append(witness)
        incumbent_matches = engine.full_match(self.incumbent_ast, witness)
        challenger_matches = engine.full_match(ast, witness)
        if incumbent_matches == challenger_matches:
            raise SessionError("distinguishing input failed to distinguish")
        survivor = ast if challenger_matches == is_valid else self.incumbent_ast
        if survivor is not self.incumbent_ast:
            self.incumbent_ast = survivor
            self.incumbent_key = key
            logger.info("candidate replaced: %s", engine.emit(survivor))
        return False


def _verifies(session: SynthesisSession, ast: RegexAst) -> bool:
    return all(engine.full_match(ast, s) for s in session.valid) and not any(
        engine.full_match(ast, s) for s in session.invalid
    )


def _thin_dsl(dsl, alphabet: engine.SessionAlphabet):
    """Drop classes indistinguishable over the session alphabet from an
    earlier one: any program using a dropped class has a retained program
    with the same language on every string the session can ever see."""
    seen = {}
    kept = []
    for name in dsl.classes:
        footprint = frozenset(CLASS_MEMBERS[name]) & set(alphabet.symbols)
        if footprint not in seen:
            seen[footprint] = name
            kept.append(name)
    if len(kept) == len(dsl.classes):
        return dsl
    return replace(dsl, classes=tuple(kept))


# --- static multi-tree -------------------------------------------------------


def _static_search(session: SynthesisSession, sp: splitter.SplitResult, interactive: bool):
    config = session.config
    columns_strings = [
        tuple(sp.fields[e][i] for e in range(len(sp.fields))) for i in range(sp.n)
    ]
    for shape in static_shapes(sp.n, config.depth_limit):
        if session.timed_out():
            return None
        session.stats.shapes_visited += 1
        budget = [config.per_shape_cap]
        columns = []
        feasible = True
        for i in range(sp.n):
            if sp.divider_columns[i]:
                text = columns_strings[i][0]
                columns.append([(_literal_ast(text), len(text))])
                continue
            cands = _column_candidates(session, columns_strings[i], shape.d, budget)
            if not cands:
                feasible = False
                break
            columns.append(cands)
        if not feasible:
            continue
        pool = _Pool(session, interactive)
        for parts in _assemblies(columns):
            if session.timed_out() or session._question_budget_spent:
                break
            budget[0] -= 1
            if budget[0] <= 0:
                logger.info("shape (%d,%d) hit the program cap", shape.n, shape.d)
                break
            session.stats.assemblies_checked += 1
            ast = normalize(Concat(tuple(p[0] for p in parts)))
            if not _verifies(session, ast):
                continue
            settled = yield from pool.offer(ast)
            if settled:
                return pool.incumbent_ast
        if pool.incumbent_ast is not None:
            return pool.incumbent_ast
    return None


def _literal_ast(text: str) -> RegexAst:
    if len(text) == 1:
        return CharLiteral(text)
    return Concat(tuple(CharLiteral(c) for c in text))


def _column_candidates(session: SynthesisSession, strings, depth: int, budget):
    """All depth-d single-tree programs matching every string of the column,
    deduplicated by language over the session alphabet."""
    config = session.config
    non_empty = [s for s in strings if s]
    if not non_empty:
        return [(_literal_ast(""), 0)]
    dsl = _thin_dsl(build_dsl(non_empty), session.alphabet)
    handle = config.make_handle()
    try:
        enc = TreeEncoding(dsl, TreeShape(1, depth), handle)
    except EncodingError:
        return []
    if config.pruning:
        enc.assert_pruning()
    enc.assert_char_coverage({c for s in non_empty for c in s})
    out = []
    seen_keys = {}
    while budget[0] > 0:
        if session.timed_out():
            break
        try:
            program = enc.next_program()
        except SolverTimeout:
            logger.warning("column enumeration timed out at depth %d", depth)
            break
        if program is None:
            break
        budget[0] -= 1
        session.stats.programs_enumerated += 1
        ast = program.to_ast(dsl)
        if all(engine.full_match(ast, s) for s in strings):
            key = engine.language_key(ast, session.alphabet)
            if key not in seen_keys:
                seen_keys[key] = True
                out.append((normalize(ast), program.node_count()))
            else:
                session.stats.equivalent_dropped += 1
        elif config.pruning:
            enc.block_equivalent(program)
    handle.close()
    return out


def _assemblies(columns):
    """Cartesian product of per-column candidates in ascending total node
    count (deterministic: ties resolve by index vector)."""
    import heapq

    start = (0,) * len(columns)

    def cost(vec):
        return sum(columns[i][vec[i]][1] for i in range(len(columns)))

    heap = [(cost(start), start)]
    seen = {start}
    while heap:
        _, vec = heapq.heappop(heap)
        yield [columns[i][vec[i]] for i in range(len(columns))]
        for i in range(len(columns)):
            if vec[i] + 1 < len(columns[i]):
                nxt = vec[:i] + (vec[i] + 1,) + vec[i + 1 :]
                if nxt not in seen:
                    seen.add(nxt)
                    heapq.heappush(heap, (cost(nxt), nxt))


# --- joint multi-tree (dynamic and k-tree modes) -----------------------------
#
# Each tree of a shape is a spine of concatenation units, so the (n,d) space
# is searched as sequences of "atoms" (non-concat-rooted trees, enumerated
# once per depth through the solver) guided by reachable-position sets on the
# example strings.  Sequences that verify are realized back into exact (n,d)
# node assignments.


@dataclass
class _Atom:
    ast: RegexAst
    nodes: int
    depth: int

    @property
    def leaf_cost(self) -> int:
        return 2 ** (self.depth - 1)


class _AtomPools:
    """Depth-exact non-concat tree programs, built on demand and cached."""

    def __init__(self, session: SynthesisSession, dsl):
        self.session = session
        self.dsl = dsl
        self.pools: dict[int, list[_Atom]] = {}

    def upto(self, depth: int) -> list[_Atom]:
        out = []
        for k in range(1, depth + 1):
            if k not in self.pools:
                self.pools[k] = self._build(k)
            out.extend(self.pools[k])
        return out

    def _build(self, depth: int) -> list[_Atom]:
        session, dsl = self.session, self.dsl
        if depth == 1:
            atoms = [
                _Atom(dsl.symbol_of(ident), 1, 1) for ident in dsl.re_terminal_ids()
            ]
            return atoms
        atoms: list[_Atom] = []
        roots = [op for op in dsl.operators if op != "concat"]
        per_root_cap = max(1, session.config.atom_cap // max(1, len(roots)))
        for op in roots:
            handle = session.config.make_handle()
            try:
                enc = TreeEncoding(dsl, TreeShape(1, depth), handle)
            except EncodingError:
                handle.close()
                return atoms
            from .solver import Eq as _Eq

            handle.add(_Eq(enc.var(0, 1), dsl.operator_id(op)))
            enc.require_depth()
            if session.config.pruning:
                enc.assert_pruning()
            count = 0
            while count < per_root_cap:
                if session.timed_out():
                    break
                try:
                    program = enc.next_program()
                except SolverTimeout:
                    logger.warning("atom pool (%s, d=%d) timed out", op, depth)
                    break
                except SolverError as exc:
                    logger.warning("atom pool failure: %s", exc)
                    break
                if program is None:
                    break
                count += 1
                session.stats.programs_enumerated += 1
                try:
                    ast = program.tree_ast(dsl, 0)
                except EncodingError:
                    continue
                atoms.append(_Atom(ast, program.node_count(), depth))
            handle.close()
        atoms.sort(key=lambda a: a.nodes)
        return atoms


def _joint_search(session: SynthesisSession, dsl, shapes, interactive: bool):
    pools = _AtomPools(session, dsl)
    for shape in shapes:
        if session.timed_out():
            return None
        session.stats.shapes_visited += 1
        pool = _Pool(session, interactive)
        restart = True
        while restart:
            restart = False
            example_count = len(session.valid) + len(session.invalid)
            for atoms in _assembly_dfs(session, pools, shape):
                program = _realize_program(session, dsl, shape, atoms)
                if program is None:
                    continue
                session.stats.assemblies_checked += 1
                ast = normalize(program.to_ast(dsl))
                settled = yield from pool.offer(ast)
                if settled:
                    return pool.incumbent_ast
                if len(session.valid) + len(session.invalid) != example_count:
                    restart = True  # an answer added an example: re-run the shape
                    break
                if session._question_budget_spent:
                    break
        if pool.incumbent_ast is not None:
            return pool.incumbent_ast
    return None


def _assembly_dfs(session: SynthesisSession, pools: _AtomPools, shape):
    """Verifying atom sequences for one shape, in DFS order over atoms sorted
    by node count, pruned by reachable-position sets and a dead-state memo."""
    valid = list(session.valid)
    invalid = list(session.invalid)
    strings = valid + invalid
    n_valid = len(valid)
    atoms = pools.upto(shape.d)
    budget = shape.n * 2 ** (shape.d - 1)
    node_budget = shape.total_nodes

    # transitions deduplicated by span behavior on the current strings
    reps: list[tuple[_Atom, list]] = []
    seen_behavior = {}
    for atom in atoms:
        if atom.depth > shape.d:
            continue
        try:
            tables = [engine.span_ends(atom.ast, s) for s in strings]
        except engine.EngineError:
            continue
        key = tuple(tables)
        if key in seen_behavior:
            continue
        seen_behavior[key] = atom
        reps.append((atom, tables))

    start = tuple(1 for _ in strings)
    targets = [1 << len(s) for s in strings]
    dead: set = set()

    def goal(masks, units):
        if units < shape.n:
            return False
        for i in range(n_valid):
            if not masks[i] & targets[i]:
                return False
        for i in range(n_valid, len(strings)):
            if masks[i] & targets[i]:
                return False
        return True

    def step(masks, tables):
        out = []
        for i, mask in enumerate(masks):
            acc = 0
            table = tables[i]
            m = mask
            while m:
                low = m & -m
                acc |= table[low.bit_length() - 1]
                m ^= low
            if acc == 0 and i < n_valid:
                return None
            out.append(acc)
        return tuple(out)

    def rec(masks, leafslots, units, nodes_used, seq):
        if session.timed_out() or session._question_budget_spent:
            return True  # treat as productive to avoid caching partial results
        key = (masks, leafslots, min(units, shape.n))
        if key in dead:
            return False
        yielded = False
        if goal(masks, units):
            yield list(seq)
            yielded = True
        for atom, tables in reps:
            if leafslots + atom.leaf_cost > budget:
                continue
            if nodes_used + atom.nodes > node_budget:
                continue
            nxt = step(masks, tables)
            if nxt is None:
                continue
            seq.append(atom)
            produced = yield from rec(
                nxt, leafslots + atom.leaf_cost, units + 1, nodes_used + atom.nodes, seq
            )
            seq.pop()
            yielded = yielded or produced
        if not yielded:
            dead.add(key)
        return yielded

    yield from rec(start, 0, 0, 0, [])


def _spine_fit(caps: list[int]):
    """Interval DP over an ordered unit group: the best achievable root level
    margin, with split reconstruction.  caps[i] is the deepest spine level
    unit i may sit at."""
    m = len(caps)
    best = [[0] * m for _ in range(m)]
    split = [[0] * m for _ in range(m)]
    for i in range(m):
        best[i][i] = caps[i]
    for width in range(2, m + 1):
        for i in range(0, m - width + 1):
            j = i + width - 1
            best_val, best_k = -1, -1
            for k in range(i, j):
                val = min(best[i][k], best[k + 1][j]) - 1
                if val > best_val:
                    best_val, best_k = val, k
            best[i][j] = best_val
            split[i][j] = best_k
    return best, split


def _group_ast(units, split, i, j):
    if i == j:
        return units[i].ast
    k = split[i][j]
    return Concat((_group_ast(units, split, i, k), _group_ast(units, split, k + 1, j)))


def _realize_program(session, dsl, shape, atoms):
    """Partition the unit sequence into shape.n trees, each an ordered spine
    fitting depth d; None when no partition fits."""
    from .enumerator import MultiTreeProgram, encode_ast

    m = len(atoms)
    caps = [shape.d - a.depth + 1 for a in atoms]
    best, split = _spine_fit(caps)
    fit = [[best[i][j] >= 1 for j in range(m)] for i in range(m)]
    # partition into exactly n consecutive non-empty fitting groups
    n = shape.n
    reach = [[False] * (n + 1) for _ in range(m + 1)]
    reach[0][0] = True
    back = [[None] * (n + 1) for _ in range(m + 1)]
    for j in range(1, m + 1):
        for g in range(1, n + 1):
            for i in range(j):
                if reach[i][g - 1] and fit[i][j - 1]:
                    reach[j][g] = True
                    back[j][g] = i
                    break
    if not reach[m][n]:
        return None
    bounds = []
    j, g = m, n
    while g > 0:
        i = back[j][g]
        bounds.append((i, j - 1))
        j, g = i, g - 1
    bounds.reverse()
    trees = []
    for a, b in bounds:
        ast = _group_ast(atoms, split, a, b)
        try:
            trees.append(encode_ast(dsl, shape.d, ast))
        except EncodingError:
            return None
    return MultiTreeProgram(shape, tuple(trees))


# --- stage two ---------------------------------------------------------------


def _stage_two(session: SynthesisSession, regex_ast: RegexAst, interactive: bool):
    config = session.config
    for x in session.conditional_invalid:
        if not engine.full_match(regex_ast, x):
            _fail(
                session,
                f"conditional invalid example {x!r} is not matched by the regex; "
                "it cannot be excluded by capture conditions",
            )
            return None
    decomposition = cap.atomic_decompose(regex_ast)
    max_groups = min(len(decomposition), config.placement_group_cap)
    for group_count in range(1, max_groups + 1):
        for placement in cap.enumerate_placements(decomposition, group_count):
            if session.timed_out():
                session.best_effort = True
                return None
            grouped = cap.apply_placement(decomposition, placement)
            try:
                result = yield from _solve_placement(session, grouped, interactive)
            except cap.Infeasible:
                continue
            if result is not None:
                return result
    _fail(
        session,
        "no capturing-group placement admits conditions separating the "
        "conditional invalid examples",
    )
    return None


def _solve_placement(session: SynthesisSession, grouped: RegexAst, interactive: bool):
    config = session.config
    while True:
        if not interactive:
            conditions = cap.synthesize_conditions(
                grouped, session.valid, session.conditional_invalid, config.make_handle()
            )
            return _finish_conditions(session, grouped, conditions)
        sets = list(
            cap.enumerate_condition_sets(
                grouped,
                session.valid,
                session.conditional_invalid,
                config.make_handle,
                limit=config.condition_alternative_cap,
            )
        )
        incumbent = sets[0]
        asked = False
        for challenger in sets[1:]:
            if session.stats.questions >= config.question_cap:
                session._question_budget_spent = True
                break
            if session.timed_out():
                break
            witness = cap.distinguish_conditions(
                incumbent, challenger, session.valid, grouped, config.make_handle()
            )
            if witness is None:
                continue
            is_valid = yield Question(witness, "captures")
            if is_valid:
                session.valid.append(witness)
            else:
                session.conditional_invalid.append(witness)
            asked = True
            break  # examples changed: re-solve this placement
        if not asked:
            return _finish_conditions(session, grouped, incumbent)


def _finish_conditions(session: SynthesisSession, grouped: RegexAst, conditions):
    table = cap.capture_table(grouped, session.valid, session.conditional_invalid)
    final = cap.tighten(conditions, table)
    # tightening must not break separation; keep the solver's bounds if it does
    ok = all(
        any(not c.holds(row[c.group]) for c in final) for row in table.conditional_invalid
    )
    return RegexValidation(grouped, final if ok else tuple(conditions))
