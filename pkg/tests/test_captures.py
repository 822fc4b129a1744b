import pytest

from regval import captures, engine
from regval.captures import (
    Infeasible,
    apply_placement,
    atomic_decompose,
    brute_force_minimum,
    capture_table,
    distinguish_conditions,
    enumerate_condition_sets,
    enumerate_placements,
    synthesize_conditions,
    tighten,
)
from regval.model import CaptureCondition, Cmp
from regval.solver import BuiltinSolver
from tests.conftest import DATE_CONDITIONAL, DATE_VALID

DATE = engine.parse("[0-9]{2}/[0-9]{2}/[0-9]{4}")


def test_atomic_decompose_date():
    units = atomic_decompose(DATE)
    assert [engine.emit(u) for u in units] == ["[0-9]{2}", "/", "[0-9]{2}", "/", "[0-9]{4}"]


def test_atomic_decompose_single_unit():
    assert atomic_decompose(engine.parse("a*")) == [engine.parse("a*")]


def test_atomic_decompose_union_is_atomic():
    # concatenation inside a union branch does not split the unit
    ast = engine.parse("ab|c")
    units = atomic_decompose(ast)
    assert len(units) == 1
    assert engine.emit(units[0]) == "ab|c"


def test_decompose_recompose_identity():
    for text in ("[0-9]{2}/[0-9]{2}/[0-9]{4}", "a*", "ab|c", "a+b?c{2}"):
        ast = engine.parse(text)
        units = atomic_decompose(ast)
        from regval.model import normalize

        assert normalize(captures.recompose(units)) == normalize(ast)


def test_enumerate_placements_first_and_counts():
    units = atomic_decompose(DATE)
    single = list(enumerate_placements(units, 1))
    assert single[0] == [(0, 0)]
    assert engine.emit(apply_placement(units, single[0])) == "([0-9]{2})/[0-9]{2}/[0-9]{4}"
    triple = list(enumerate_placements(units, 3))
    assert [(0, 0), (2, 2), (4, 4)] in triple
    assert (
        engine.emit(apply_placement(units, [(0, 0), (2, 2), (4, 4)]))
        == "([0-9]{2})/([0-9]{2})/([0-9]{4})"
    )
    # lexicographic order by interval boundaries
    assert single == sorted(single)
    assert triple == sorted(triple)


def test_enumerate_placements_edge_cases():
    one = atomic_decompose(engine.parse("a*"))
    assert list(enumerate_placements(one, 1)) == [[(0, 0)]]
    assert list(enumerate_placements(one, 2)) == []


def grouped_day_month():
    units = atomic_decompose(DATE)
    return apply_placement(units, [(0, 0), (2, 2)])


def test_synthesize_conditions_date():
    grouped = grouped_day_month()
    conds = synthesize_conditions(grouped, DATE_VALID, DATE_CONDITIONAL, BuiltinSolver(30))
    assert len(conds) == 4
    assert {(c.group, c.op) for c in conds} == {
        (0, Cmp.LE),
        (0, Cmp.GE),
        (1, Cmp.LE),
        (1, Cmp.GE),
    }
    table = capture_table(grouped, DATE_VALID, DATE_CONDITIONAL)
    tightened = tighten(conds, table)
    by_key = {(c.group, c.op): c.bound for c in tightened}
    assert by_key[(0, Cmp.LE)] == 31 and by_key[(0, Cmp.GE)] == 1
    assert by_key[(1, Cmp.LE)] == 12


def test_synthesize_conditions_nothing_to_exclude():
    grouped = engine.parse("([0-9])")
    conds = synthesize_conditions(grouped, ["5"], [], BuiltinSolver())
    assert conds == ()


def test_synthesize_conditions_infeasible_day_only():
    units = atomic_decompose(DATE)
    day_only = apply_placement(units, [(0, 0)])
    with pytest.raises(Infeasible):
        synthesize_conditions(day_only, DATE_VALID, DATE_CONDITIONAL, BuiltinSolver(30))


def test_nonnumeric_placement_is_infeasible():
    grouped = engine.parse("([a-z]+)[0-9]")
    with pytest.raises(Infeasible):
        capture_table(grouped, ["ab1"], [])


def test_minimality_matches_brute_force():
    grouped = grouped_day_month()
    table = capture_table(grouped, DATE_VALID, DATE_CONDITIONAL)
    assert brute_force_minimum(table) == 4
    conds = synthesize_conditions(grouped, DATE_VALID, DATE_CONDITIONAL, BuiltinSolver(30))
    assert len(conds) == brute_force_minimum(table)


def test_synthesized_conditions_separate_examples():
    grouped = grouped_day_month()
    conds = synthesize_conditions(grouped, DATE_VALID, DATE_CONDITIONAL, BuiltinSolver(30))
    for s in DATE_VALID:
        values = engine.extract_captures(grouped, s)
        assert all(c.holds(values[c.group]) for c in conds)
    for s in DATE_CONDITIONAL:
        values = engine.extract_captures(grouped, s)
        assert any(not c.holds(values[c.group]) for c in conds)


def test_condition_encoding_uses_capture_against_bound():
    # for capture value 27 and the <=-condition, the asserted comparison is
    # 27 <= b: with the condition forced on, any model's bound is >= 27
    grouped = engine.parse("([0-9]{2})")
    handle = BuiltinSolver()
    system = captures.encode_condition_system(
        capture_table(grouped, ["27"], []), handle
    )
    from regval.solver import is_true

    handle.add(is_true(system.u_vars[(0, Cmp.LE)]))
    model = handle.check()
    assert model is not None
    assert model[system.b_vars[(0, Cmp.LE)]] >= 27


def test_enumerate_condition_sets_first_is_minimal():
    grouped = grouped_day_month()
    sets = list(
        enumerate_condition_sets(
            grouped, DATE_VALID, DATE_CONDITIONAL, lambda: BuiltinSolver(30), limit=40
        )
    )
    assert len(sets) == 16  # 2 day upper bounds x 8 month lower bounds
    assert all(len(s) == 4 for s in sets)
    assert len({s for s in sets}) == len(sets)


def test_distinguish_conditions_example_six():
    grouped = grouped_day_month()
    s1 = (CaptureCondition(0, Cmp.LE, 31),)
    s2 = (CaptureCondition(0, Cmp.LE, 32),)
    witness = distinguish_conditions(s1, s2, DATE_VALID, grouped, BuiltinSolver())
    assert witness == "32/08/1996"
    # classification differs between the two sets
    values = engine.extract_captures(grouped, witness)
    assert not s1[0].holds(values[0]) and s2[0].holds(values[0])


def test_distinguish_conditions_equal_sets():
    grouped = grouped_day_month()
    s = (CaptureCondition(0, Cmp.LE, 31),)
    assert distinguish_conditions(s, s, DATE_VALID, grouped, BuiltinSolver()) is None


def test_distinguish_conditions_ge_bounds():
    # oracle: brute-force integers 0..2 for the separating value
    grouped = grouped_day_month()
    s1 = (CaptureCondition(0, Cmp.GE, 1),)
    s2 = (CaptureCondition(0, Cmp.GE, 2),)
    separating = [v for v in range(0, 3) if (v >= 1) != (v >= 2)]
    assert separating == [1]
    witness = distinguish_conditions(s1, s2, DATE_VALID, grouped, BuiltinSolver())
    assert witness == "01/08/1996"
    values = engine.extract_captures(grouped, witness)
    assert values[0] == 1


def test_distinguishing_string_classified_differently():
    grouped = grouped_day_month()
    sets = list(
        enumerate_condition_sets(
            grouped, DATE_VALID, DATE_CONDITIONAL, lambda: BuiltinSolver(30), limit=6
        )
    )
    for challenger in sets[1:3]:
        witness = distinguish_conditions(sets[0], challenger, DATE_VALID, grouped, BuiltinSolver())
        if witness is None:
            continue
        values = engine.extract_captures(grouped, witness)
        hold_1 = all(c.holds(values[c.group]) for c in sets[0])
        hold_2 = all(c.holds(values[c.group]) for c in challenger)
        assert hold_1 != hold_2
