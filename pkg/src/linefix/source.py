"""Line-oriented source text with lossless round-tripping.

Functions are line addressed: a source is a dense 0-based sequence of lines.
CR-LF pairs are folded to LF once at ingestion and the fold is recorded, so
everything downstream can assume LF-only text.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceUnit:
    """A source snippet split into lines.

    Attributes:
        lines: the text lines, without line terminators.
        had_trailing_newline: whether the original text ended with LF.
        newline_normalized: whether CR-LF pairs were folded during ingestion.
    """

    lines: tuple[str, ...]
    had_trailing_newline: bool = False
    newline_normalized: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.lines, tuple):
            object.__setattr__(self, "lines", tuple(self.lines))
        for line in self.lines:
            if "\n" in line:
                raise ValueError("source lines must not contain newline characters")


def from_text(text: str) -> SourceUnit:
    """Split text into a SourceUnit, folding CR-LF to LF."""
    normalized = False
    if "\r\n" in text:
        text = text.replace("\r\n", "\n")
        normalized = True
    if text == "":
        return SourceUnit((), had_trailing_newline=False, newline_normalized=normalized)
    trailing = text.endswith("\n")
    if trailing:
        text = text[:-1]
    return SourceUnit(tuple(text.split("\n")), trailing, normalized)


def to_text(unit: SourceUnit) -> str:
    """Join lines back into text, restoring the trailing newline if present."""
    text = "\n".join(unit.lines)
    if unit.had_trailing_newline:
        text += "\n"
    return text


def number_lines(unit: SourceUnit) -> str:
    """Render each line as ``<decimal index><one space><line>``, LF separated."""
    return "\n".join(f"{i} {line}" for i, line in enumerate(unit.lines))
