import itertools

import pytest

from regval.solver import (
    And,
    BuiltinSolver,
    Eq,
    Ge,
    Iff,
    Implies,
    Le,
    Ne,
    Not,
    Or,
    SmtLibSolver,
    SolverFailure,
    Var,
    VarNe,
    formula_to_smtlib,
    is_true,
    parse_value_response,
)


def test_check_single_equality():
    handle = BuiltinSolver()
    x = handle.declare_int("x", 0, 10)
    handle.add(Eq(x, 3))
    model = handle.check()
    assert model == {x: 3}


def test_check_contradiction_unsat():
    handle = BuiltinSolver()
    x = handle.declare_int("x", 0, 10)
    handle.add(Eq(x, 3))
    handle.add(Eq(x, 4))
    assert handle.check() is None


def test_blocking_clause_never_returns_model_again():
    handle = BuiltinSolver()
    x = handle.declare_int("x", 0, 2)
    y = handle.declare_int("y", 0, 2)
    seen = set()
    while True:
        model = handle.check()
        if model is None:
            break
        assert (model[x], model[y]) not in seen
        seen.add((model[x], model[y]))
        handle.block_assignment([(x, model[x]), (y, model[y])])
    assert len(seen) == 9


def test_check_without_blocking_repeats_model():
    handle = BuiltinSolver()
    x = handle.declare_int("x", 0, 5)
    handle.add(Or((Eq(x, 1), Eq(x, 4))))
    first = handle.check()
    second = handle.check()
    assert first == second


def test_partial_nogood_blocks_family():
    handle = BuiltinSolver()
    x = handle.declare_int("x", 0, 2)
    y = handle.declare_int("y", 0, 2)
    handle.block_assignment([(x, 1)])
    models = []
    while True:
        model = handle.check()
        if model is None:
            break
        models.append(model)
        handle.block_assignment([(x, model[x]), (y, model[y])])
    assert all(m[x] != 1 for m in models)
    assert len(models) == 6


def test_guarded_implication_propagates():
    handle = BuiltinSolver()
    x = handle.declare_int("x", 0, 3)
    y = handle.declare_int("y", 0, 3)
    handle.add(Eq(x, 2))
    handle.add(Implies(Eq(x, 2), Or((Eq(y, 1), Eq(y, 3)))))
    models = set()
    while True:
        model = handle.check()
        if model is None:
            break
        models.add(model[y])
        handle.block_assignment(list(model.items()))
    assert models == {1, 3}


def test_maximize_symmetric_soft():
    handle = BuiltinSolver()
    a = handle.declare_bool("a")
    b = handle.declare_bool("b")
    handle.add(Or((is_true(a), is_true(b))))
    handle.add_soft(Not(is_true(a)))
    handle.add_soft(Not(is_true(b)))
    model, satisfied = handle.maximize()
    assert satisfied == 1
    assert model[a] + model[b] == 1


def test_maximize_without_soft_behaves_like_check():
    handle = BuiltinSolver()
    x = handle.declare_int("x", 2, 7)
    handle.add(Le(x, 3))
    model, satisfied = handle.maximize()
    assert satisfied == 0
    assert model[x] <= 3


def test_maximize_matches_brute_force_on_random_instances():
    import random

    rng = random.Random(11)
    for trial in range(12):
        n = 4
        handle = BuiltinSolver()
        bools = [handle.declare_bool(f"b{i}") for i in range(n)]
        hard = []
        for _ in range(3):
            clause = [
                (is_true(v) if rng.random() < 0.5 else Not(is_true(v)))
                for v in rng.sample(bools, 2)
            ]
            hard.append(Or(tuple(clause)))
            handle.add(hard[-1])
        softs = [Not(is_true(v)) for v in bools]
        for s in softs:
            handle.add_soft(s)

        def eval_formula(f, assignment):
            if isinstance(f, Eq):
                return assignment[f.var] == f.value
            if isinstance(f, Not):
                return not eval_formula(f.f, assignment)
            if isinstance(f, Or):
                return any(eval_formula(p, assignment) for p in f.parts)
            raise AssertionError

        best = -1
        for bits in itertools.product((0, 1), repeat=n):
            assignment = dict(zip(bools, bits))
            if all(eval_formula(h, assignment) for h in hard):
                best = max(best, sum(1 for s in softs if eval_formula(s, assignment)))
        got = handle.maximize()
        if best < 0:
            assert got is None
        else:
            assert got is not None and got[1] == best


def test_push_pop_scopes():
    handle = BuiltinSolver()
    x = handle.declare_int("x", 0, 5)
    handle.add(Ge(x, 1))
    handle.push()
    handle.add(Eq(x, 0))
    assert handle.check() is None
    handle.pop()
    assert handle.check() is not None


def test_generic_engine_handles_iff_and_varne():
    handle = BuiltinSolver()
    u = handle.declare_bool("u")
    s = handle.declare_bool("s")
    b = handle.declare_int("b", 0, 40)
    handle.add(Iff(is_true(s), Implies(is_true(u), Ge(b, 27))))
    handle.add(is_true(s))
    handle.add(is_true(u))
    model = handle.check()
    assert model[b] >= 27

    handle2 = BuiltinSolver()
    p = handle2.declare_int("p", 0, 1)
    q = handle2.declare_int("q", 0, 1)
    handle2.add(VarNe(p, q))
    model2 = handle2.check()
    assert model2[p] != model2[q]


def test_smtlib_formula_serialization():
    x = Var("x", 0, 9, 0)
    b = Var("b", 0, 1, 1)
    assert formula_to_smtlib(Eq(x, 3)) == "(= x 3)"
    assert formula_to_smtlib(Ne(x, 3)) == "(not (= x 3))"
    assert formula_to_smtlib(Le(x, -2)) == "(<= x (- 2))"
    assert (
        formula_to_smtlib(Implies(Eq(x, 1), Or((Eq(b, 0), Eq(b, 1)))))
        == "(=> (= x 1) (or (= b 0) (= b 1)))"
    )
    assert formula_to_smtlib(And((Ge(x, 1), Not(Eq(b, 0))))) == "(and (>= x 1) (not (= b 0)))"
    assert formula_to_smtlib(Iff(Eq(b, 1), VarNe(x, b))) == "(= (= b 1) (not (= x b)))"


def test_smtlib_model_parsing():
    values = parse_value_response("((x 3) (y (- 2)) (z 0))")
    assert values == {"x": 3, "y": -2, "z": 0}


def test_smtlib_missing_binary_raises():
    with pytest.raises(SolverFailure):
        SmtLibSolver("/nonexistent/solver-binary")


def test_deep_enum_system_decodes_to_well_typed_regex(date_truth_regex):
    # k-tree leaf/children/output system for the (thinned) date DSL at (1,2)
    from regval.dsl import build_dsl
    from regval.enumerator import TreeEncoding, TreeShape
    from tests.conftest import DATE_VALID

    handle = BuiltinSolver()
    enc = TreeEncoding(build_dsl(DATE_VALID), TreeShape(1, 2), handle)
    program = enc.next_program()
    assert program is not None
    ast = program.to_ast(enc.dsl)  # decoding type-checks the model
    assert ast is not None
