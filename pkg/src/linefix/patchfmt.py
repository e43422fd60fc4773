"""The line-addressed patch format.

A patch is one or more spans separated by ``<sep>``::

    patch := span ("<sep>" span)*
    span  := INT "-" INT "<MID>" rawbody

``line_bef`` is the 0-based index of the last unchanged line before the edit
and ``line_af`` the first unchanged line after it; the open interval between
them is replaced by the body. ``line_bef = -1`` addresses the position before
line 0 and ``line_af = len(lines)`` the position after the last line, so edits
at either boundary stay expressible. The body is carried verbatim: everything
after ``<MID>`` up to the next ``<sep>`` or end of input, split on LF. One
trailing LF of the whole input is trimmed before parsing.

A body whose last line is empty (and the lone-empty-line body ``[""]``) does
not survive serialize/parse because the trailing-LF trim and the empty-body
deletion encoding claim the same bytes; such bodies are valid but their
serialization re-parses without the trailing empty line.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from linefix.errors import (
    BelowSentinel,
    ConflictingSpans,
    MalformedBody,
    MalformedHeader,
    NonIncreasingSpan,
)

MID = "<MID>"
SEP = "<sep>"

_HEADER_RE = re.compile(r"(-?\d+)-(-?\d+)<MID>")


class SpanKind(enum.Enum):
    INSERTION = "insertion"
    REPLACEMENT = "replacement"
    DELETION = "deletion"
    NOOP = "noop"


@dataclass(frozen=True)
class EditSpan:
    """One edit: replace lines ``line_bef+1 .. line_af-1`` with ``body``."""

    line_bef: int
    line_af: int
    body: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))
        if self.line_bef < -1:
            raise BelowSentinel(f"line_bef {self.line_bef} is below the -1 sentinel")
        if self.line_bef >= self.line_af:
            raise NonIncreasingSpan(
                f"span {self.line_bef}-{self.line_af} must have line_bef < line_af"
            )
        for line in self.body:
            if "\n" in line:
                raise MalformedBody("body lines must not contain LF")
            if "\r" in line:
                raise MalformedBody("body lines must not contain CR")
            if MID in line or SEP in line:
                raise MalformedBody(f"body lines must not contain {MID} or {SEP}")

    def replaced_range(self) -> range:
        """Indices of the source lines this span replaces (may be empty)."""
        return range(self.line_bef + 1, self.line_af)


@dataclass(frozen=True)
class PatchSet:
    """An ordered collection of edit spans against one source."""

    spans: tuple[EditSpan, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not isinstance(self.spans, tuple):
            object.__setattr__(self, "spans", tuple(self.spans))

    def canonical(self) -> "PatchSet":
        """Spans sorted ascending by (line_bef, line_af)."""
        return PatchSet(tuple(sorted(self.spans, key=_span_key)))

    def __len__(self) -> int:
        return len(self.spans)


def _span_key(span: EditSpan) -> tuple[int, int]:
    return (span.line_bef, span.line_af)


def check_disjoint(spans: tuple[EditSpan, ...]) -> None:
    """Raise ConflictingSpans on duplicate anchors or overlapping intervals.

    Spans may touch (s.line_af == t.line_bef + 1); their replaced ranges are
    still disjoint, which keeps application order independent.
    """
    ordered = sorted(spans, key=_span_key)
    for s, t in zip(ordered, ordered[1:]):
        if _span_key(s) == _span_key(t):
            raise ConflictingSpans(
                f"duplicate span {s.line_bef}-{s.line_af}"
            )
        if s.line_af > t.line_bef + 1:
            raise ConflictingSpans(
                f"span {s.line_bef}-{s.line_af} overlaps {t.line_bef}-{t.line_af}"
            )


def parse_patch(text: str) -> PatchSet:
    """Parse patch text into a PatchSet, preserving the as-written span order.

    Raises MalformedHeader, MalformedBody, NonIncreasingSpan, BelowSentinel,
    or ConflictingSpans. Empty input parses to an empty PatchSet.
    """
    if text.endswith("\n"):
        text = text[:-1]
    if text == "":
        return PatchSet(())
    spans = []
    for fragment in text.split(SEP):
        m = _HEADER_RE.match(fragment)
        if m is None:
            snippet = fragment[:40]
            raise MalformedHeader(f"expected INT-INT{MID} at start of span: {snippet!r}")
        rawbody = fragment[m.end():]
        body = tuple(rawbody.split("\n")) if rawbody else ()
        spans.append(EditSpan(int(m.group(1)), int(m.group(2)), body))
    check_disjoint(tuple(spans))
    return PatchSet(tuple(spans))


def serialize_patch(patch: PatchSet) -> str:
    """Serialize spans in canonical order, with no trailing LF added."""
    check_disjoint(patch.spans)
    ordered = sorted(patch.spans, key=_span_key)
    return SEP.join(
        f"{s.line_bef}-{s.line_af}{MID}" + "\n".join(s.body) for s in ordered
    )


def classify_span(span: EditSpan) -> SpanKind:
    """Classify a span; total over all valid spans."""
    consecutive = span.line_af == span.line_bef + 1
    if span.body:
        return SpanKind.INSERTION if consecutive else SpanKind.REPLACEMENT
    return SpanKind.NOOP if consecutive else SpanKind.DELETION
