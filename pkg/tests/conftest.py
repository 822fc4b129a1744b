import pytest

from regval import engine, model
from regval.model import CaptureCondition, Cmp, parse_benchmark

DATE_VALID = [
    "19/08/1996",
    "26/10/1998",
    "22/09/2000",
    "01/12/2001",
    "29/09/2003",
    "31/08/2015",
]
DATE_INVALID = [
    "19/08/96",
    "26-10-1998",
    "22.09.2000",
    "1/12/2001",
    "29/9/2003",
    "2015/08/31",
]
DATE_CONDITIONAL = [
    "33/08/1996",
    "26/00/1998",
    "22/13/2000",
    "00/12/2001",
    "12/31/2003",
    "52/03/2015",
]


def date_benchmark_text(with_conditional=False) -> str:
    parts = ["++", *DATE_VALID, "--", *DATE_INVALID]
    if with_conditional:
        parts += ["+-", *DATE_CONDITIONAL]
    return "\n".join(parts) + "\n"


@pytest.fixture
def date_examples():
    return parse_benchmark(date_benchmark_text())


@pytest.fixture
def date_examples_full():
    return parse_benchmark(date_benchmark_text(with_conditional=True))


@pytest.fixture
def date_truth_regex():
    return engine.parse("[0-9]{2}/[0-9]{2}/[0-9]{4}")


@pytest.fixture
def date_truth_validation():
    return model.RegexValidation(
        engine.parse("([0-9]{2})/([0-9]{2})/[0-9]{4}"),
        (
            CaptureCondition(0, Cmp.LE, 31),
            CaptureCondition(0, Cmp.GE, 1),
            CaptureCondition(1, Cmp.LE, 12),
            CaptureCondition(1, Cmp.GE, 1),
        ),
    )
