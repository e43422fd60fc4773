"""Test-only oracles and generators, independent of the implementations under test."""

from __future__ import annotations

import random

from linefix.patchfmt import EditSpan, PatchSet
from linefix.source import SourceUnit

LINE_POOL = (
    "",
    "{",
    "}",
    "    return 0;",
    "    int i, j;",
    "    buf[i] = 0;",
    "    if (n < 0)",
    "        goto fail;",
    "    for (i = 0; i < n; i++) {",
    "    memcpy(dst, src, n);",
)


def lcs_length(a: list[str], b: list[str]) -> int:
    """Textbook O(n*m) dynamic program; oracle for diff minimality."""
    n, m = len(a), len(b)
    prev = [0] * (m + 1)
    for i in range(1, n + 1):
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[m]


def splice_apply(lines: tuple[str, ...], patch: PatchSet) -> list[str]:
    """Naive top-down splice: walk spans ascending, copying untouched lines."""
    ordered = sorted(patch.spans, key=lambda s: (s.line_bef, s.line_af))
    out: list[str] = []
    cursor = 0
    for s in ordered:
        out.extend(lines[cursor: s.line_bef + 1])
        out.extend(s.body)
        cursor = s.line_af
    out.extend(lines[cursor:])
    return out


def shifted_sequential_apply(
    lines: tuple[str, ...], patch: PatchSet, order: list[int]
) -> list[str]:
    """Apply spans one at a time in the given order, tracking index shifts."""
    work = list(lines)
    remaining = [
        [s.line_bef, s.line_af, list(s.body)] for s in patch.spans
    ]
    for idx in order:
        bef, af, body = remaining[idx]
        work[bef + 1: af] = body
        delta = len(body) - (af - bef - 1)
        for other in remaining:
            if other is remaining[idx]:
                continue
            if other[0] >= af - 1:
                other[0] += delta
                other[1] += delta
    return work


def random_lines(rng: random.Random, max_len: int = 30) -> list[str]:
    n = rng.randrange(max_len + 1)
    return [rng.choice(LINE_POOL) for _ in range(n)]


def mutate(rng: random.Random, before: list[str]) -> list[str]:
    """Derive an 'after' by a few random edits; repeats in LINE_POOL force ties."""
    after = list(before)
    for _ in range(rng.randint(1, 4)):
        kind = rng.choice(("insert", "delete", "replace"))
        if kind == "insert" or not after:
            pos = rng.randint(0, len(after))
            after[pos:pos] = [rng.choice(LINE_POOL) for _ in range(rng.randint(1, 3))]
        elif kind == "delete":
            pos = rng.randrange(len(after))
            del after[pos: pos + rng.randint(1, 3)]
        else:
            pos = rng.randrange(len(after))
            after[pos: pos + rng.randint(1, 2)] = [
                rng.choice(LINE_POOL) + " /* new */" for _ in range(rng.randint(1, 2))
            ]
    return after


def random_pair(rng: random.Random, case_no: int) -> tuple[SourceUnit, SourceUnit]:
    """Random (before, after); every fourth case is a boundary shape."""
    shape = case_no % 8
    before = random_lines(rng)
    if shape == 0:  # prepend
        after = [rng.choice(LINE_POOL) + " /* top */"] + before
    elif shape == 1:  # append
        after = before + [rng.choice(LINE_POOL) + " /* end */"]
    elif shape == 2:  # delete everything
        after = []
    elif shape == 3:  # replace everything
        after = [rng.choice(LINE_POOL) + " /* all */" for _ in range(rng.randint(1, 5))]
    else:
        after = mutate(rng, before)
    trailing = rng.random() < 0.8
    return (
        SourceUnit(tuple(before), had_trailing_newline=trailing),
        SourceUnit(tuple(after), had_trailing_newline=trailing),
    )


def random_body(rng: random.Random, allow_empty: bool = True) -> tuple[str, ...]:
    """Body lines that survive serialize/parse (last line nonempty)."""
    if allow_empty and rng.random() < 0.2:
        return ()
    n = rng.randint(1, 3)
    body = [rng.choice(LINE_POOL) for _ in range(n)]
    body[-1] = body[-1] if body[-1] else "x = 1;"
    return tuple(body)


def random_patchset(rng: random.Random, max_line: int = 60) -> PatchSet:
    """Random valid PatchSet: disjoint spans, parse-safe bodies."""
    spans = []
    cursor = -1
    while cursor < max_line and len(spans) < 6 and rng.random() < 0.8:
        bef = rng.randint(cursor, min(cursor + 10, max_line))
        af = rng.randint(bef + 1, bef + 5)
        if spans and (bef, af) == (spans[-1].line_bef, spans[-1].line_af):
            af += 1
        spans.append(EditSpan(bef, af, random_body(rng)))
        # next span must stay disjoint: t.line_bef >= s.line_af - 1
        cursor = af - 1
        if rng.random() < 0.5:
            cursor += rng.randint(1, 4)
    if not spans:
        spans.append(EditSpan(-1, 1, random_body(rng)))
    return PatchSet(tuple(spans))
