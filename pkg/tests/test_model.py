import pytest

from regval import engine
from regval.model import (
    BenchmarkFormatError,
    CaptureCondition,
    Cmp,
    ExampleSet,
    ExampleSetError,
    RegexValidation,
    normalize,
    parse_benchmark,
    parse_condition,
    serialize_benchmark,
    validate,
)
from tests.conftest import DATE_INVALID, DATE_VALID, date_benchmark_text


def test_parse_benchmark_date_lists():
    examples = parse_benchmark(date_benchmark_text())
    assert examples.valid == tuple(DATE_VALID)
    assert examples.invalid == tuple(DATE_INVALID)
    assert examples.conditional_invalid == ()


def test_parse_benchmark_minimal():
    examples = parse_benchmark("++\nab")
    assert examples == ExampleSet(("ab",), (), ())


def test_parse_benchmark_dedups_within_section():
    text = "++\na\nb\n--\n19/08/96\nx\n19/08/96\n"
    examples = parse_benchmark(text)
    # duplicate kept once, first occurrence order preserved
    assert examples.invalid == ("19/08/96", "x")
    assert set(examples.invalid) == {"19/08/96", "x"}


def test_parse_benchmark_errors():
    with pytest.raises(BenchmarkFormatError):
        parse_benchmark("stray line\n++\na\n")
    with pytest.raises(BenchmarkFormatError):
        parse_benchmark("--\nb\n")  # mandatory ++ missing
    with pytest.raises(BenchmarkFormatError):
        parse_benchmark("++\na\n++\nb\n")  # duplicate section
    with pytest.raises(ExampleSetError):
        parse_benchmark("++\na\n--\na\n")  # cross-section duplicate


def test_serialize_round_trip():
    examples = parse_benchmark(date_benchmark_text(with_conditional=True))
    assert parse_benchmark(serialize_benchmark(examples)) == examples


def test_example_set_invariants():
    with pytest.raises(ExampleSetError):
        ExampleSet(())
    with pytest.raises(ExampleSetError):
        ExampleSet(("",), ())  # empty string only as invalid
    ok = ExampleSet(("a",), ("",))
    assert ok.invalid == ("",)
    with pytest.raises(ExampleSetError):
        ExampleSet(("a",), ("b",), ("a",))


def test_condition_render_and_parse():
    cond = CaptureCondition(0, Cmp.LE, 31)
    assert cond.render() == "$0 <= 31"
    assert parse_condition("$1 >= 2") == CaptureCondition(1, Cmp.GE, 2)
    assert cond.holds(31) and not cond.holds(32)
    with pytest.raises(ValueError):
        parse_condition("$0 < 31")


def test_validation_group_bound():
    regex = engine.parse("([0-9]{2})/[0-9]{2}")
    RegexValidation(regex, (CaptureCondition(0, Cmp.LE, 31),))
    with pytest.raises(ValueError):
        RegexValidation(regex, (CaptureCondition(1, Cmp.LE, 31),))


def test_validate_date_validation_all_pass(date_truth_validation):
    examples = parse_benchmark(date_benchmark_text(with_conditional=True))
    report = validate(date_truth_validation, examples)
    assert report.ok
    assert len(report.entries) == 18


def test_validate_invalid_matched_is_reported():
    validation = RegexValidation(engine.parse("a|b"), ())
    report = validate(validation, ExampleSet(("a",), ("b",)))
    assert not report.ok
    (failure,) = report.failures()
    assert failure.example == "b" and "matched" in failure.reason


def test_validate_conditional_clause(date_truth_validation):
    # without conditions the conditional-invalid example fails its clause;
    # with the date conditions attached it passes (matched, $0 = 33 > 31)
    bare = RegexValidation(date_truth_validation.regex, ())
    examples = ExampleSet(("19/08/1996",), (), ("33/08/1996",))
    report = validate(bare, examples)
    assert not report.ok
    assert report.failures()[0].example == "33/08/1996"
    # oracle: manual capture of $0 on 33/08/1996 is 33
    assert engine.extract_captures(date_truth_validation.regex, "33/08/1996")[0] == 33
    report2 = validate(date_truth_validation, examples)
    assert report2.ok


def test_validate_is_pure(date_truth_validation, date_examples_full):
    first = validate(date_truth_validation, date_examples_full)
    second = validate(date_truth_validation, date_examples_full)
    assert first == second


def test_normalize_flattens_concat():
    ast = engine.parse("abc")
    from regval.model import CharLiteral, Concat

    nested = Concat((Concat((CharLiteral("a"), CharLiteral("b"))), CharLiteral("c")))
    assert normalize(nested) == ast
