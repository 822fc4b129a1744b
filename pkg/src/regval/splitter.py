"""Static multi-tree preprocessing: dividing substrings and example splitting."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SplitResult:
    """Each valid example split into the same alternation of fields and dividers.

    `fields[e]` are the n pieces of example e; joining them reproduces the
    example.  `divider_columns[i]` is True when column i holds a divider
    occurrence (the same substring in every example).
    """

    n: int
    fields: tuple[tuple[str, ...], ...]
    dividers: tuple[str, ...]
    divider_columns: tuple[bool, ...]

    @property
    def did_split(self) -> bool:
        return self.n > 1


def _greedy_occurrences(s: str, t: str) -> list[int]:
    """Start offsets of non-overlapping left-to-right occurrences of t in s."""
    out = []
    i = s.find(t)
    while i != -1:
        out.append(i)
        i = s.find(t, i + len(t))
    return out


def find_dividing_substrings(valid, invalid=()) -> list[str]:
    """Substrings occurring the same number of times, in the same order, in
    every valid example.

    Candidates come from the shortest valid example.  Longer candidates are
    preferred; among those, the ones yielding fewer fields.  With a single
    valid example every substring qualifies trivially, so candidates are kept
    only when they are non-alphanumeric or occur in an invalid example.
    """
    valid = list(valid)
    if not valid:
        raise ValueError("empty valid set")
    base = min(valid, key=lambda s: (len(s), s))
    seen = set()
    candidates = []
    for i in range(len(base)):
        for j in range(i + 1, len(base) + 1):
            t = base[i:j]
            if t not in seen:
                seen.add(t)
                candidates.append(t)

    dividing = []
    for t in candidates:
        counts = [len(_greedy_occurrences(s, t)) for s in valid]
        if counts[0] >= 1 and all(c == counts[0] for c in counts):
            dividing.append((t, counts[0]))

    # preference: delimiter-like (containing a non-alphanumeric character)
    # first, then longer, then fewer fields, then leftmost in the base
    # example, then lexicographically smallest.  Without the delimiter rule a
    # digit that happens to occur once per example would beat '-' in
    # 555-123-4567-style data and block it as order-inconsistent.
    dividing.sort(
        key=lambda tc: (
            all(ch.isalnum() for ch in tc[0]),
            -len(tc[0]),
            tc[1],
            base.find(tc[0]),
            tc[0],
        )
    )

    if len(valid) == 1:
        # every substring qualifies trivially; keep only the best candidate,
        # and only when it is a pure delimiter or occurs in an invalid example
        dividing = [
            (t, c)
            for t, c in dividing
            if all(not ch.isalnum() for ch in t) or any(t in s for s in invalid)
        ][:1]

    accepted: list[str] = []
    occurrences: list[list[tuple[int, int, str]]] = [[] for _ in valid]
    for t, _count in dividing:
        trial = []
        ok = True
        for e, s in enumerate(valid):
            spans = [(p, p + len(t), t) for p in _greedy_occurrences(s, t)]
            merged = sorted(occurrences[e] + spans)
            for (a0, a1, _), (b0, b1, _) in zip(merged, merged[1:]):
                if b0 < a1:  # overlaps an already accepted divider
                    ok = False
                    break
            if not ok:
                break
            trial.append(merged)
        if not ok:
            continue
        label_seqs = {tuple(lbl for _, _, lbl in merged) for merged in trial}
        if len(label_seqs) != 1:
            continue
        if not _segments_consistent(valid, trial):
            continue
        accepted.append(t)
        occurrences = trial

    if not accepted:
        return []
    # report in joint occurrence order (first appearance)
    order = []
    for _, _, lbl in occurrences[0]:
        if lbl not in order:
            order.append(lbl)
    return order


def _segments_consistent(valid, occurrence_lists) -> bool:
    """Inter-occurrence segments must be empty in every example or in none,
    so a divider never manufactures a field that only some examples have."""
    emptiness = []
    for s, merged in zip(valid, occurrence_lists):
        row = []
        pos = 0
        for a, b, _ in merged:
            row.append(a == pos)
            pos = b
        row.append(pos == len(s))
        emptiness.append(tuple(row))
    return len(set(emptiness)) == 1


def split(valid, invalid=()) -> SplitResult:
    """Split every valid example before and after the dividing substrings.

    Divider occurrences become their own fields.  Columns that are empty in
    every example are dropped.  Without dividers the result has n = 1.
    """
    valid = list(valid)
    if not valid:
        raise ValueError("empty valid set")
    dividers = find_dividing_substrings(valid, invalid)
    if not dividers:
        return SplitResult(
            n=1,
            fields=tuple((s,) for s in valid),
            dividers=(),
            divider_columns=(False,),
        )

    per_example: list[list[tuple[int, int, str]]] = []
    for s in valid:
        spans = []
        for t in dividers:
            spans.extend((p, p + len(t), t) for p in _greedy_occurrences(s, t))
        per_example.append(sorted(spans))

    rows: list[list[str]] = []
    flags: list[bool] = []
    for e, s in enumerate(valid):
        row = []
        row_flags = []
        pos = 0
        for a, b, t in per_example[e]:
            row.append(s[pos:a])
            row_flags.append(False)
            row.append(t)
            row_flags.append(True)
            pos = b
        row.append(s[pos:])
        row_flags.append(False)
        rows.append(row)
        if e == 0:
            flags = row_flags

    width = len(rows[0])
    keep = [i for i in range(width) if flags[i] or any(row[i] for row in rows)]
    fields = tuple(tuple(row[i] for i in keep) for row in rows)
    return SplitResult(
        n=len(keep),
        fields=fields,
        dividers=tuple(dividers),
        divider_columns=tuple(flags[i] for i in keep),
    )
