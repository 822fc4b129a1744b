"""Problem-specific DSL construction from the valid examples."""

from __future__ import annotations

import string
from dataclasses import dataclass

from .model import Between, CharClass, CharLiteral, Exact, RangeLit, RegexAst

# The fixed character-class family: the three base classes, their four unions,
# and the two hexadecimal classes.
CLASS_FAMILY: tuple[tuple[str, str], ...] = (
    ("[0-9]", string.digits),
    ("[A-Z]", string.ascii_uppercase),
    ("[a-z]", string.ascii_lowercase),
    ("[0-9A-Z]", string.digits + string.ascii_uppercase),
    ("[0-9a-z]", string.digits + string.ascii_lowercase),
    ("[A-Za-z]", string.ascii_uppercase + string.ascii_lowercase),
    ("[0-9A-Za-z]", string.digits + string.ascii_uppercase + string.ascii_lowercase),
    ("[0-9A-F]", string.digits + "ABCDEF"),
    ("[0-9a-f]", string.digits + "abcdef"),
)

CLASS_MEMBERS: dict[str, frozenset[str]] = {name: frozenset(chars) for name, chars in CLASS_FAMILY}
CLASS_ORDER: dict[str, int] = {name: i for i, (name, _) in enumerate(CLASS_FAMILY)}

EPSILON = 0

UNION, CONCAT, KLEENE, PLUS, OPTION, RANGE = "union", "concat", "kleene", "plus", "option", "range"
OPERATOR_ORDER = (UNION, CONCAT, KLEENE, PLUS, OPTION, RANGE)

# parameter types: "re" and "rangelit"; arity is padded with epsilon children
OPERATOR_PARAMS: dict[str, tuple[str, ...]] = {
    UNION: ("re", "re"),
    CONCAT: ("re", "re"),
    KLEENE: ("re",),
    PLUS: ("re",),
    OPTION: ("re",),
    RANGE: ("re", "rangelit"),
}


class DslError(ValueError):
    pass


@dataclass(frozen=True)
class DslSpec:
    """Terminals and typed operators of one synthesis problem.

    Symbol ids are assigned deterministically: epsilon is 0, then literals by
    code point, classes in family order, range literals (exact ascending, then
    windows lexicographically), and finally the operators.
    """

    literals: tuple[str, ...]
    classes: tuple[str, ...]
    range_literals: tuple[RangeLit, ...]
    operators: tuple[str, ...]
    max_len: int  # length of the longest valid example this DSL was built from
    k: int = 2

    # --- id tables -------------------------------------------------------

    def symbols(self) -> list[object]:
        """id -> symbol; index 0 is epsilon (None)."""
        out: list[object] = [None]
        out.extend(CharLiteral(c) for c in self.literals)
        out.extend(CharClass(name) for name in self.classes)
        out.extend(self.range_literals)
        out.extend(self.operators)
        return out

    def id_of(self, symbol) -> int:
        try:
            return self._index()[symbol]
        except KeyError:
            raise DslError(f"symbol {symbol!r} is not in this DSL") from None

    def symbol_of(self, ident: int):
        table = self.symbols()
        if not 0 <= ident < len(table):
            raise DslError(f"id {ident} out of range")
        return table[ident]

    def _index(self) -> dict:
        cached = getattr(self, "_index_cache", None)
        if cached is None:
            cached = {sym: i for i, sym in enumerate(self.symbols()) if i > 0}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    @property
    def max_id(self) -> int:
        return len(self.symbols()) - 1

    def re_terminal_ids(self) -> tuple[int, ...]:
        n_lit = len(self.literals) + len(self.classes)
        return tuple(range(1, n_lit + 1))

    def rangelit_ids(self) -> tuple[int, ...]:
        start = len(self.literals) + len(self.classes) + 1
        return tuple(range(start, start + len(self.range_literals)))

    def operator_ids(self) -> tuple[int, ...]:
        start = len(self.literals) + len(self.classes) + len(self.range_literals) + 1
        return tuple(range(start, start + len(self.operators)))

    def operator_id(self, name: str) -> int | None:
        if name not in self.operators:
            return None
        return self.operator_ids()[self.operators.index(name)]

    def sigma_re_ids(self) -> tuple[int, ...]:
        """Ids of all symbols of type Re: operators plus literal/class terminals."""
        return self.re_terminal_ids() + self.operator_ids()

    def leaf_ids(self) -> tuple[int, ...]:
        """Ids a leaf node may take: epsilon or any terminal."""
        return (EPSILON,) + self.re_terminal_ids() + self.rangelit_ids()

    def child_types(self, ident: int) -> tuple[str, str]:
        """Types the two children of a node with this id must have."""
        sym = self.symbol_of(ident)
        if isinstance(sym, str):  # operator
            params = OPERATOR_PARAMS[sym]
            return (params[0], params[1] if len(params) > 1 else "eps")
        return ("eps", "eps")  # terminals and epsilon have no children

    def ids_of_type(self, typ: str) -> tuple[int, ...]:
        if typ == "re":
            return self.sigma_re_ids()
        if typ == "rangelit":
            return self.rangelit_ids()
        if typ == "eps":
            return (EPSILON,)
        raise DslError(f"unknown type {typ!r}")


def build_dsl(valid: list[str] | tuple[str, ...]) -> DslSpec:
    """Derive the DSL from the valid examples.

    Literals are the distinct characters of the valid strings; a family class
    is included iff it contains at least one of them; range-literal bounds are
    limited by the longest example length.  With a longest length of 1 the
    range operator is dropped entirely.
    """
    if not valid:
        raise DslError("cannot build a DSL from an empty valid set")
    if any(not s for s in valid):
        raise DslError("valid examples must be non-empty strings")

    chars = sorted({c for s in valid for c in s})
    classes = tuple(name for name, members in CLASS_FAMILY if any(c in CLASS_MEMBERS[name] for c in chars))
    longest = max(len(s) for s in valid)

    exacts = [Exact(m) for m in range(2, longest + 1)]
    betweens = [
        Between(m, n)
        for m in range(0, longest)
        for n in range(m + 1, longest + 1)
        if (m, n) != (0, 1)
    ]
    range_literals = tuple(exacts) + tuple(betweens)
    operators = OPERATOR_ORDER if range_literals else OPERATOR_ORDER[:-1]

    return DslSpec(
        literals=tuple(chars),
        classes=classes,
        range_literals=range_literals,
        operators=operators,
        max_len=longest,
    )


def terminal_matches_char(terminal: RegexAst, char: str) -> bool:
    if isinstance(terminal, CharLiteral):
        return terminal.char == char
    if isinstance(terminal, CharClass):
        return char in CLASS_MEMBERS[terminal.name]
    return False
