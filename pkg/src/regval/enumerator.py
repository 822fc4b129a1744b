"""Multi-tree encodings over a DSL: constraints, enumeration, pruning, blocking.

A program is an assignment of production ids to the nodes of n complete
binary trees (level-order indices 1..2^d-1 per tree, epsilon = 0).  The
encoding asserts leaf, children and output typing constraints; enumeration
returns models one at a time, blocking each.  Pruning templates exclude all
but one representative of common regex identities, and rejected programs can
additionally block their union-commuted variants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .dsl import CONCAT, DslSpec, EPSILON, KLEENE, OPTION, PLUS, RANGE, UNION
from .model import (
    Between,
    CharClass,
    CharLiteral,
    Concat,
    Exact,
    Kleene,
    Option,
    Plus,
    Range,
    RegexAst,
    Union,
)
from .solver import And, Eq, Implies, Ne, Or, SolverHandle, Var, VarNe


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class TreeShape:
    """n complete k-trees of depth d (k fixed to 2 for the regex operators)."""

    n: int
    d: int
    k: int = 2

    def __post_init__(self):
        if self.n < 1 or self.d < 2 or self.k != 2:
            raise ValueError(f"bad shape ({self.n},{self.d})")

    @property
    def nodes_per_tree(self) -> int:
        return 2**self.d - 1

    @property
    def total_nodes(self) -> int:
        return self.n * self.nodes_per_tree

    def is_leaf(self, i: int) -> bool:
        return i >= 2 ** (self.d - 1)

    def children(self, i: int) -> tuple[int, int]:
        return 2 * i, 2 * i + 1

    def subtree(self, i: int) -> list[int]:
        """Node indices of the complete subtree rooted at i, in level order."""
        out = [i]
        frontier = [i]
        while True:
            nxt = []
            for j in frontier:
                if not self.is_leaf(j):
                    a, b = self.children(j)
                    nxt += [a, b]
            if not nxt:
                return out
            out += nxt
            frontier = nxt


@dataclass(frozen=True)
class MultiTreeProgram:
    """Assignment of production ids to the shape's nodes (index 0 <-> node 1)."""

    shape: TreeShape
    node_ids: tuple[tuple[int, ...], ...]

    def node_count(self) -> int:
        return sum(1 for tree in self.node_ids for ident in tree if ident != EPSILON)

    def tree_ast(self, dsl: DslSpec, t: int) -> RegexAst:
        return _decode_node(dsl, self.shape, self.node_ids[t], 1)

    def to_ast(self, dsl: DslSpec) -> RegexAst:
        trees = [self.tree_ast(dsl, t) for t in range(self.shape.n)]
        return trees[0] if len(trees) == 1 else Concat(tuple(trees))


def _decode_node(dsl: DslSpec, shape: TreeShape, ids: tuple[int, ...], i: int) -> RegexAst:
    sym = dsl.symbol_of(ids[i - 1])
    if sym is None:
        raise EncodingError(f"epsilon at node {i} where a value was expected")
    if isinstance(sym, (CharLiteral, CharClass)):
        return sym
    if isinstance(sym, (Exact, Between)):
        raise EncodingError(f"range literal at node {i} outside a range operator")
    c1, c2 = shape.children(i)
    if sym == UNION:
        return Union(_decode_node(dsl, shape, ids, c1), _decode_node(dsl, shape, ids, c2))
    if sym == CONCAT:
        return Concat((_decode_node(dsl, shape, ids, c1), _decode_node(dsl, shape, ids, c2)))
    if sym == KLEENE:
        return Kleene(_decode_node(dsl, shape, ids, c1))
    if sym == PLUS:
        return Plus(_decode_node(dsl, shape, ids, c1))
    if sym == OPTION:
        return Option(_decode_node(dsl, shape, ids, c1))
    if sym == RANGE:
        reps = dsl.symbol_of(ids[c2 - 1])
        if not isinstance(reps, (Exact, Between)):
            raise EncodingError(f"node {c2} should hold a range literal")
        return Range(_decode_node(dsl, shape, ids, c1), reps)
    raise EncodingError(f"cannot decode symbol {sym!r}")


PRUNING_TEMPLATES = (
    "quantifier_nesting",
    "quantifier_over_range",
    "range_over_quantifier",
    "nested_exact_range",
    "union_distinct_children",
)


class TreeEncoding:
    """One (dsl, shape) encoding on a solver handle."""

    def __init__(self, dsl: DslSpec, shape: TreeShape, handle: SolverHandle):
        if not dsl.re_terminal_ids():
            raise EncodingError("DSL has no terminal of the output type")
        self.dsl = dsl
        self.shape = shape
        self.handle = handle
        self.vars: list[list[Var]] = []
        self._encode()

    def var(self, t: int, i: int) -> Var:
        return self.vars[t][i - 1]

    def _encode(self):
        dsl, shape, handle = self.dsl, self.shape, self.handle
        max_id = dsl.max_id
        leaf_ids = set(dsl.leaf_ids())
        sigma_re = dsl.sigma_re_ids()
        rangelit_ids = set(dsl.rangelit_ids())
        re_terminals = set(dsl.re_terminal_ids())
        operator_ids = set(dsl.operator_ids())

        for t in range(shape.n):
            tree_vars = [
                handle.declare_int(f"n{t}_{i}", 0, max_id)
                for i in range(1, shape.nodes_per_tree + 1)
            ]
            self.vars.append(tree_vars)

        for t in range(shape.n):
            # output constraint: each tree root is of type Re
            handle.add(Or(tuple(Eq(self.var(t, 1), p) for p in sigma_re)))
            for i in range(1, shape.nodes_per_tree + 1):
                if shape.is_leaf(i):
                    handle.add(Or(tuple(Eq(self.var(t, i), p) for p in sorted(leaf_ids))))
                    continue
                c1, c2 = shape.children(i)
                for ident in range(0, max_id + 1):
                    if ident == EPSILON or ident in re_terminals or ident in rangelit_ids:
                        types = ("eps", "eps")
                    elif ident in operator_ids:
                        types = dsl.child_types(ident)
                    else:
                        continue
                    for child, typ in ((c1, types[0]), (c2, types[1])):
                        allowed = dsl.ids_of_type(typ)
                        if not allowed:
                            # untypable production at this node
                            handle.add(Ne(self.var(t, i), ident))
                            break
                        handle.add(
                            Implies(
                                Eq(self.var(t, i), ident),
                                Or(tuple(Eq(self.var(t, child), a) for a in allowed)),
                            )
                        )

    # --- auxiliary constraints ---------------------------------------------

    def assert_pruning(self, templates=PRUNING_TEMPLATES):
        """Block redundant representations (each blocked program stays
        semantically equal to some retained one)."""
        dsl, shape, handle = self.dsl, self.shape, self.handle
        quant_ids = [q for q in (dsl.operator_id(KLEENE), dsl.operator_id(PLUS), dsl.operator_id(OPTION)) if q]
        range_id = dsl.operator_id(RANGE)
        union_id = dsl.operator_id(UNION)
        low_windows = [
            dsl.id_of(rl)
            for rl in dsl.range_literals
            if isinstance(rl, Between) and rl.lo <= 1
        ]
        exacts = {rl.times: dsl.id_of(rl) for rl in dsl.range_literals if isinstance(rl, Exact)}

        for t in range(shape.n):
            for i in range(1, shape.nodes_per_tree + 1):
                if shape.is_leaf(i):
                    continue
                c1, c2 = shape.children(i)
                if "quantifier_nesting" in templates and quant_ids:
                    for q in quant_ids:
                        handle.add(
                            Implies(
                                Eq(self.var(t, i), q),
                                And(tuple(Ne(self.var(t, c1), q2) for q2 in quant_ids)),
                            )
                        )
                if "range_over_quantifier" in templates and range_id:
                    bad = [q for q in (dsl.operator_id(KLEENE), dsl.operator_id(OPTION)) if q]
                    if bad:
                        handle.add(
                            Implies(
                                Eq(self.var(t, i), range_id),
                                And(tuple(Ne(self.var(t, c1), q) for q in bad)),
                            )
                        )
                if not shape.is_leaf(c1):
                    g2 = shape.children(c1)[1]  # range-literal slot of a range at c1
                    if "quantifier_over_range" in templates and range_id and low_windows:
                        for q in quant_ids:
                            for rl in low_windows:
                                handle.block_assignment(
                                    [
                                        (self.var(t, i), q),
                                        (self.var(t, c1), range_id),
                                        (self.var(t, g2), rl),
                                    ]
                                )
                    if "nested_exact_range" in templates and range_id:
                        for m_outer, id_outer in exacts.items():
                            for m_inner, id_inner in exacts.items():
                                if m_outer * m_inner <= dsl.max_len:
                                    handle.block_assignment(
                                        [
                                            (self.var(t, i), range_id),
                                            (self.var(t, c2), id_outer),
                                            (self.var(t, c1), range_id),
                                            (self.var(t, g2), id_inner),
                                        ]
                                    )
                if "union_distinct_children" in templates and union_id:
                    pairs = tuple(
                        VarNe(self.var(t, a), self.var(t, b))
                        for a, b in zip(shape.subtree(c1), shape.subtree(c2))
                    )
                    handle.add(Implies(Eq(self.var(t, i), union_id), Or(pairs)))

    def assert_char_coverage(self, chars):
        """Characters every accepted string needs must be producible somewhere
        (sound: programs lacking them cannot match the valid examples)."""
        dsl, shape, handle = self.dsl, self.shape, self.handle
        for c in sorted(set(chars)):
            capable = [
                ident
                for ident in dsl.re_terminal_ids()
                if _terminal_covers(dsl, ident, c)
            ]
            if not capable:
                raise EncodingError(f"no terminal can produce {c!r}")
            literals = [
                Eq(self.var(t, i), ident)
                for t in range(shape.n)
                for i in range(1, shape.nodes_per_tree + 1)
                for ident in capable
            ]
            handle.add(Or(tuple(literals)))

    # --- enumeration ---------------------------------------------------------

    def next_program(self) -> MultiTreeProgram | None:
        """Next well-typed program, with its blocking clause asserted; None
        once the shape is exhausted."""
        model = self.handle.check()
        if model is None:
            return None
        ids = tuple(
            tuple(model[self.var(t, i)] for i in range(1, self.shape.nodes_per_tree + 1))
            for t in range(self.shape.n)
        )
        self.handle.block_assignment(
            [(self.var(t, i + 1), ids[t][i]) for t in range(self.shape.n) for i in range(len(ids[t]))]
        )
        return MultiTreeProgram(self.shape, ids)

    def block_partial(self, program: MultiTreeProgram, nodes) -> None:
        """Block a sub-assignment given as (tree, node) pairs."""
        self.handle.block_assignment(
            [(self.var(t, i), program.node_ids[t][i - 1]) for t, i in nodes]
        )

    def require_depth(self) -> None:
        """Require a non-epsilon node on the deepest level, restricting the
        encoding to programs of exactly this depth (shallower programs are
        already covered by smaller shapes)."""
        deepest = range(2 ** (self.shape.d - 1), self.shape.nodes_per_tree + 1)
        literals = tuple(
            Eq(self.var(t, i), value)
            for t in range(self.shape.n)
            for i in deepest
            for value in range(1, self.dsl.max_id + 1)
        )
        self.handle.add(Or(literals))

    def forbid_root(self, operator: str) -> None:
        ident = self.dsl.operator_id(operator)
        if ident is not None:
            for t in range(self.shape.n):
                self.handle.add(Ne(self.var(t, 1), ident))

    def block_equivalent(self, program: MultiTreeProgram) -> int:
        """Block every union-commuted variant of a rejected program; returns
        the number of variants blocked."""
        union_id = self.dsl.operator_id(UNION)
        if union_id is None:
            return 0
        positions = [
            (t, i)
            for t in range(self.shape.n)
            for i in range(1, self.shape.nodes_per_tree + 1)
            if not self.shape.is_leaf(i) and program.node_ids[t][i - 1] == union_id
        ]
        if not positions:
            return 0
        blocked = 0
        by_depth = sorted(positions, key=lambda ti: -ti[1])
        for r in range(1, len(positions) + 1):
            for subset in itertools.combinations(positions, r):
                chosen = [p for p in by_depth if p in subset]
                arrays = [list(tree) for tree in program.node_ids]
                for t, i in chosen:
                    self._swap_subtrees(arrays[t], i)
                variant = tuple(tuple(a) for a in arrays)
                if variant == program.node_ids:
                    continue
                self.handle.block_assignment(
                    [
                        (self.var(t, i + 1), variant[t][i])
                        for t in range(self.shape.n)
                        for i in range(len(variant[t]))
                    ]
                )
                blocked += 1
        return blocked

    def _swap_subtrees(self, array: list[int], i: int):
        c1, c2 = self.shape.children(i)
        for a, b in zip(self.shape.subtree(c1), self.shape.subtree(c2)):
            array[a - 1], array[b - 1] = array[b - 1], array[a - 1]

def _terminal_covers(dsl: DslSpec, ident: int, char: str) -> bool:
    from .dsl import terminal_matches_char

    return terminal_matches_char(dsl.symbol_of(ident), char)


def encode_ast(dsl: DslSpec, depth: int, ast: RegexAst) -> tuple[int, ...]:
    """Node assignment of one complete depth-d tree holding the AST (n-ary
    concatenations are binarized right-leaning)."""
    size = 2**depth - 1
    first_leaf = 2 ** (depth - 1)
    ids = [EPSILON] * size

    def place(node: RegexAst, i: int):
        if i > size:
            raise EncodingError("ast exceeds the tree size")
        if isinstance(node, (CharLiteral, CharClass)):
            ids[i - 1] = dsl.id_of(node)
            return
        if i >= first_leaf:
            raise EncodingError("operator placed on a leaf")
        c1, c2 = 2 * i, 2 * i + 1
        if isinstance(node, Concat) and len(node.children) > 2:
            node = Concat((node.children[0], Concat(tuple(node.children[1:]))))
        if isinstance(node, Union):
            ids[i - 1] = dsl.id_of(UNION)
            place(node.left, c1)
            place(node.right, c2)
        elif isinstance(node, Concat):
            ids[i - 1] = dsl.id_of(CONCAT)
            place(node.children[0], c1)
            place(node.children[1], c2)
        elif isinstance(node, Kleene):
            ids[i - 1] = dsl.id_of(KLEENE)
            place(node.child, c1)
        elif isinstance(node, Plus):
            ids[i - 1] = dsl.id_of(PLUS)
            place(node.child, c1)
        elif isinstance(node, Option):
            ids[i - 1] = dsl.id_of(OPTION)
            place(node.child, c1)
        elif isinstance(node, Range):
            ids[i - 1] = dsl.id_of(RANGE)
            place(node.child, c1)
            ids[c2 - 1] = dsl.id_of(node.reps)
        else:
            raise EncodingError(f"cannot encode {node!r}")

    place(ast, 1)
    return tuple(ids)


# ---------------------------------------------------------------------------
# Shape schedules


def static_shapes(n: int, depth_limit: int = 6):
    """Fixed n, increasing depth."""
    for d in range(2, depth_limit + 1):
        yield TreeShape(n, d)


def dynamic_shapes(node_limit: int = 40, depth_limit: int = 6):
    """All (n, d) in ascending node count n*(2^d - 1); ties favour the
    shallower, wider shape."""
    shapes = []
    for d in range(2, depth_limit + 1):
        per_tree = 2**d - 1
        n = 1
        while n * per_tree <= node_limit:
            shapes.append(TreeShape(n, d))
            n += 1
    shapes.sort(key=lambda s: (s.total_nodes, s.d))
    yield from shapes
