import itertools

import pytest

from regval import engine
from regval.dsl import OPERATOR_PARAMS, DslSpec, build_dsl
from regval.enumerator import (
    EncodingError,
    MultiTreeProgram,
    TreeEncoding,
    TreeShape,
    dynamic_shapes,
    encode_ast,
    static_shapes,
)
from regval.model import Between, CharClass, CharLiteral, Exact, Kleene, Option, Plus, Union
from regval.solver import BuiltinSolver, Eq
from tests.conftest import DATE_VALID

TINY = DslSpec(
    literals=("a",),
    classes=("[0-9]",),
    range_literals=(Exact(2),),
    operators=("union", "concat", "kleene", "plus", "option", "range"),
    max_len=2,
)


def enumerate_all(dsl, shape, pruning=False, cap=200000):
    handle = BuiltinSolver(check_timeout=120)
    enc = TreeEncoding(dsl, shape, handle)
    if pruning:
        enc.assert_pruning()
    out = []
    while len(out) < cap:
        program = enc.next_program()
        if program is None:
            break
        out.append(program)
    return out


# --- independent typing oracle ------------------------------------------------


def well_typed(dsl, shape, flat_ids) -> bool:
    """Brute-force typing check, independent of the encoder."""

    def sym(i):
        return dsl.symbol_of(flat_ids[i - 1])

    def check(i, expected):
        s = sym(i)
        if expected == "eps":
            ok = s is None
        elif expected == "rangelit":
            ok = isinstance(s, (Exact, Between))
        elif expected == "re":
            ok = isinstance(s, (CharLiteral, CharClass)) or (
                isinstance(s, str) and s in OPERATOR_PARAMS
            )
        else:
            return False
        if not ok:
            return False
        if shape.is_leaf(i):
            return not isinstance(s, str)  # operators need children
        c1, c2 = shape.children(i)
        if isinstance(s, str):
            params = OPERATOR_PARAMS[s]
            t1 = params[0]
            t2 = params[1] if len(params) > 1 else "eps"
            return check(c1, t1) and check(c2, t2)
        return check(c1, "eps") and check(c2, "eps")

    return check(1, "re")


def test_enumeration_equals_brute_force_at_depth_2():
    shape = TreeShape(1, 2)
    got = {p.node_ids[0] for p in enumerate_all(TINY, shape)}
    brute = {
        ids
        for ids in itertools.product(range(TINY.max_id + 1), repeat=3)
        if well_typed(TINY, shape, ids)
    }
    assert got == brute


def test_enumeration_equals_brute_force_at_depth_3():
    shape = TreeShape(1, 3)
    got = {p.node_ids[0] for p in enumerate_all(TINY, shape)}
    # brute force: internal nodes over all ids, leaves over leaf ids only
    leaf_choices = range(TINY.max_id + 1)
    brute = set()
    for ids in itertools.product(leaf_choices, repeat=7):
        if well_typed(TINY, TreeShape(1, 3), ids):
            brute.add(ids)
    assert got == brute
    assert len(got) > 0


def test_single_literal_dsl_programs():
    dsl = DslSpec(
        literals=("a",),
        classes=(),
        range_literals=(Exact(2),),
        operators=("union", "concat", "kleene", "plus", "option", "range"),
        max_len=2,
    )
    programs = enumerate_all(dsl, TreeShape(1, 2))
    emitted = {engine.emit(p.to_ast(dsl)) for p in programs}
    assert emitted == {"a", "a*", "a+", "a?", "a|a", "aa", "a{2}"}


def test_programs_never_repeat_and_decode(date_truth_regex):
    programs = enumerate_all(TINY, TreeShape(1, 2))
    seen = set()
    for p in programs:
        assert p.node_ids not in seen
        seen.add(p.node_ids)
        p.to_ast(TINY)  # decodes without error


def test_children_constraint_example():
    # node 1 = range forces child 2 into Sigma(Re) and child 3 into the
    # range literals, per the date DSL
    dsl = build_dsl(DATE_VALID)
    handle = BuiltinSolver()
    enc = TreeEncoding(dsl, TreeShape(1, 2), handle)
    handle.add(Eq(enc.var(0, 1), dsl.operator_id("range")))
    sigma_re_terminals = set(dsl.re_terminal_ids())
    rangelits = set(dsl.rangelit_ids())
    while True:
        program = enc.next_program()
        if program is None:
            break
        ids = program.node_ids[0]
        assert ids[1] in sigma_re_terminals  # leaves cannot hold operators
        assert ids[2] in rangelits


def test_leaf_constraint_example():
    dsl = build_dsl(DATE_VALID)
    leaf_ids = set(dsl.leaf_ids())
    assert 0 in leaf_ids
    assert set(dsl.rangelit_ids()) <= leaf_ids
    assert set(dsl.operator_ids()).isdisjoint(leaf_ids)
    for program in enumerate_all(TINY, TreeShape(1, 2))[:50]:
        for leaf_value in program.node_ids[0][1:]:
            assert leaf_value in set(TINY.leaf_ids())


def test_date_fig_program_reachable_at_static_shape():
    # the multi-tree with n=5 decoding to [0-9]{2}/[0-9]{2}/[0-9]{4} is a
    # model of the (5,2) encoding: pin it and check satisfiability
    dsl = build_dsl(DATE_VALID)
    shape = TreeShape(5, 2)
    handle = BuiltinSolver()
    enc = TreeEncoding(dsl, shape, handle)
    digit = dsl.id_of(CharClass("[0-9]"))
    slash = dsl.id_of(CharLiteral("/"))
    rng = dsl.operator_id("range")
    two = dsl.id_of(Exact(2))
    four = dsl.id_of(Exact(4))
    target = (
        (rng, digit, two),
        (slash, 0, 0),
        (rng, digit, two),
        (slash, 0, 0),
        (rng, digit, four),
    )
    for t, tree in enumerate(target):
        for i, value in enumerate(tree):
            handle.add(Eq(enc.var(t, i + 1), value))
    program = enc.next_program()
    assert program is not None and program.node_ids == target
    assert engine.emit(program.to_ast(dsl)) == "[0-9]{2}/[0-9]{2}/[0-9]{4}"


def _walk_nodes(ast):
    yield ast
    for attr in ("left", "right", "child"):
        node = getattr(ast, attr, None)
        if node is not None:
            yield from _walk_nodes(node)
    for node in getattr(ast, "children", ()):
        yield from _walk_nodes(node)


def test_pruning_blocks_quantifier_nesting_and_union_idempotence():
    programs = enumerate_all(TINY, TreeShape(1, 3), pruning=True)
    assert programs
    for p in programs:
        for node in _walk_nodes(p.to_ast(TINY)):
            if isinstance(node, Plus):
                assert not isinstance(node.child, Option), "(r?)+ survived pruning"
            if isinstance(node, (Kleene, Plus, Option)):
                assert not isinstance(node.child, (Kleene, Plus, Option))
            if isinstance(node, Union):
                assert node.left != node.right, "r|r survived pruning"


def test_pruning_strictly_reduces_count():
    full = enumerate_all(TINY, TreeShape(1, 3))
    pruned = enumerate_all(TINY, TreeShape(1, 3), pruning=True)
    assert len(pruned) < len(full)


def test_pruned_programs_have_retained_equivalents():
    alpha = engine.build_session_alphabet(["a1"], TINY.classes)
    full = enumerate_all(TINY, TreeShape(1, 3))
    pruned = enumerate_all(TINY, TreeShape(1, 3), pruning=True)
    kept_keys = {engine.language_key(p.to_ast(TINY), alpha) for p in pruned}
    dropped = [p for p in full if p.node_ids not in {q.node_ids for q in pruned}]
    for p in dropped:
        assert engine.language_key(p.to_ast(TINY), alpha) in kept_keys


def test_block_equivalent_counts():
    dsl = TINY
    handle = BuiltinSolver()
    enc = TreeEncoding(dsl, TreeShape(1, 2), handle)
    union_id = dsl.operator_id("union")
    lit = dsl.id_of(CharLiteral("a"))
    digit = dsl.id_of(CharClass("[0-9]"))
    program = MultiTreeProgram(TreeShape(1, 2), ((union_id, lit, digit),))
    blocked = enc.block_equivalent(program)
    assert blocked == 1  # the swapped variant; the model block itself is separate
    no_union = MultiTreeProgram(TreeShape(1, 2), ((lit, 0, 0),))
    assert enc.block_equivalent(no_union) == 0


def test_block_equivalent_two_unions_blocks_three_variants():
    dsl = TINY
    handle = BuiltinSolver()
    enc = TreeEncoding(dsl, TreeShape(1, 3), handle)
    union_id = dsl.operator_id("union")
    lit = dsl.id_of(CharLiteral("a"))
    digit = dsl.id_of(CharClass("[0-9]"))
    ids = (union_id, union_id, lit, lit, digit, 0, 0)
    program = MultiTreeProgram(TreeShape(1, 3), (ids,))
    # 2^2 swap combinations; the identity is the model's own blocking clause
    assert enc.block_equivalent(program) == 3


def test_rejecting_union_blocks_swapped_variant():
    dsl = TINY
    handle = BuiltinSolver()
    enc = TreeEncoding(dsl, TreeShape(1, 2), handle)
    union_id = dsl.operator_id("union")
    lit = dsl.id_of(CharLiteral("a"))
    digit = dsl.id_of(CharClass("[0-9]"))
    seen = []
    while True:
        program = enc.next_program()
        if program is None:
            break
        seen.append(program.node_ids[0])
        if program.node_ids[0] == (union_id, lit, digit):
            enc.block_equivalent(program)
    assert (union_id, lit, digit) in seen
    assert (union_id, digit, lit) not in seen


def test_shape_schedule():
    first_six = list(itertools.islice(dynamic_shapes(node_limit=40), 6))
    assert [(s.n, s.d) for s in first_six] == [(1, 2), (2, 2), (1, 3), (3, 2), (4, 2), (2, 3)]
    assert [s.total_nodes for s in first_six] == [3, 6, 7, 9, 12, 14]
    # tie at 15 nodes resolves to the wider, shallower shape
    seq = list(dynamic_shapes(node_limit=40))
    i15 = [s for s in seq if s.total_nodes == 15]
    assert [(s.n, s.d) for s in i15] == [(5, 2), (1, 4)]
    # static schedule
    static = list(itertools.islice(static_shapes(5), 3))
    assert [(s.n, s.d) for s in static] == [(5, 2), (5, 3), (5, 4)]


def test_dynamic_schedule_node_counts_non_decreasing():
    seq = list(itertools.islice(dynamic_shapes(node_limit=400, depth_limit=8), 50))
    assert len(seq) == 50
    counts = [s.total_nodes for s in seq]
    assert counts == sorted(counts)


def test_unencodable_dsl():
    dsl = DslSpec(literals=(), classes=(), range_literals=(), operators=("union",), max_len=1)
    with pytest.raises(EncodingError):
        TreeEncoding(dsl, TreeShape(1, 2), BuiltinSolver())


def test_encode_ast_round_trip():
    ast = engine.parse("a{2}|[0-9]")
    ids = encode_ast(TINY, 3, ast)
    program = MultiTreeProgram(TreeShape(1, 3), (ids,))
    assert program.to_ast(TINY) == ast
    with pytest.raises(EncodingError):
        encode_ast(TINY, 2, engine.parse("aa[0-9]"))  # needs depth 3
