import pytest

from regval.splitter import find_dividing_substrings, split
from tests.conftest import DATE_VALID


def brute_force_count(s: str, t: str) -> int:
    count = pos = 0
    while True:
        i = s.find(t, pos)
        if i == -1:
            return count
        count += 1
        pos = i + len(t)


def test_date_divider_is_slash_not_zero():
    dividers = find_dividing_substrings(DATE_VALID)
    assert dividers == ["/"]
    counts = {brute_force_count(s, "0") for s in DATE_VALID}
    assert len(counts) > 1  # '0' occurs a varying number of times


def test_no_common_substring():
    assert find_dividing_substrings(["ab", "cd"]) == []


def test_dash_divider():
    # oracle: brute-force over all common substrings and count occurrences
    examples = ["a-b-c", "x-y-zz"]
    base = min(examples, key=lambda s: (len(s), s))
    common = {
        base[i:j]
        for i in range(len(base))
        for j in range(i + 1, len(base) + 1)
        if len({brute_force_count(s, base[i:j]) for s in examples}) == 1
        and brute_force_count(examples[0], base[i:j]) >= 1
    }
    assert common == {"-"}
    assert find_dividing_substrings(examples) == ["-"]
    result = split(examples)
    assert [brute_force_count(s, "-") for s in examples] == [2, 2]
    assert result.fields[0] == ("a", "-", "b", "-", "c")


def test_split_date_example():
    result = split(DATE_VALID)
    assert result.n == 5
    assert result.fields[0] == ("19", "/", "08", "/", "1996")
    assert result.fields[3] == ("01", "/", "12", "/", "2001")
    assert result.dividers == ("/",)
    assert result.divider_columns == (False, True, False, True, False)


def test_split_reconstruction_property():
    for examples in (DATE_VALID, ["a-b-c", "x-y-zz"], ["ab", "cd"], ["#fff", "#000"]):
        result = split(examples)
        for original, fields in zip(examples, result.fields):
            assert "".join(fields) == original


def test_split_without_dividers():
    result = split(["ab", "cd"])
    assert result.n == 1
    assert result.fields == (("ab",), ("cd",))
    assert result.dividers == ()


def test_single_example_suppresses_alnum_splits():
    # every substring of a single example trivially qualifies; at most the
    # best candidate is kept, and only when it is a pure delimiter or occurs
    # in an invalid example
    result = split(["abc"])
    assert result.n == 1
    result2 = split(["ist193985"], invalid=["ost425891", "ist187"])
    assert len(result2.dividers) == 1
    assert result2.dividers[0].startswith("ist")
    result3 = split(["19/08/1996"])
    assert result3.dividers == ("/",)


def test_prefix_divider_drops_empty_column():
    # the leading empty column (before the "ist" prefix) is dropped; with
    # only two examples other coincidental dividing substrings may appear
    result = split(["ist193985", "ist425891"])
    assert "ist" in result.dividers
    assert result.fields[0][0] == "ist"
    assert all(row[0] == "ist" for row in result.fields)
    # with more examples the coincidences vanish
    result4 = split(["ist193985", "ist425891", "ist187769", "ist194149"])
    assert result4.dividers == ("ist",)
    assert result4.n == 2
    assert result4.fields[0] == ("ist", "193985")


def test_digit_does_not_beat_delimiter():
    valid = ["555-123-4567", "800-555-0199", "212-736-5000", "907-555-0100"]
    # '1' occurs exactly once in every example but must not pre-empt '-'
    assert {brute_force_count(s, "1") for s in valid} == {1}
    result = split(valid)
    assert result.dividers == ("-",)
    assert result.n == 5


def test_divider_count_and_order_property():
    for examples in (DATE_VALID, ["10:20:30", "01:02:03"]):
        result = split(examples)
        for t in result.dividers:
            assert len({brute_force_count(s, t) for s in examples}) == 1


def test_empty_valid_set_rejected():
    with pytest.raises(ValueError):
        split([])
