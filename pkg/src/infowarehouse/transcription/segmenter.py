"""Deterministic document segmentation.

The default "paragraph" rule set splits on blank-line boundaries and carries
the nearest preceding heading along as context. A heading is a line that is
either all-caps (at least four characters, contains letters, none lowercase)
or starts with a section number like "1.", "2)" or "3.1". Heading lines are
context, not content: they never become segments themselves.
"""

import re
from dataclasses import dataclass

from ..errors import ValidationError

_NUMBERED = re.compile(r"^\d+(\.\d+)*[.)]\s+\S")
_DOTTED = re.compile(r"^\d+(\.\d+)+\s+\S")


@dataclass(frozen=True)
class Segment:
    doc_id: str
    start: int
    end: int
    text: str
    heading_context: str | None = None


def is_heading(line: str) -> bool:
    stripped = line.strip()
    if not stripped:
        return False
    all_caps = (
        len(stripped) >= 4
        and any(ch.isalpha() for ch in stripped)
        and stripped == stripped.upper()
    )
    return all_caps or bool(_NUMBERED.match(stripped) or _DOTTED.match(stripped))


def _lines_with_offsets(text: str) -> list[tuple[int, int, str]]:
    lines = []
    pos = 0
    for raw in text.split("\n"):
        lines.append((pos, pos + len(raw), raw))
        pos += len(raw) + 1
    return lines


def _segment_paragraphs(doc_id: str, text: str) -> list[Segment]:
    lines = _lines_with_offsets(text)
    blocks: list[list[tuple[int, int, str]]] = []
    current: list[tuple[int, int, str]] = []
    for line in lines:
        if line[2].strip():
            current.append(line)
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)

    segments: list[Segment] = []
    heading: str | None = None
    for block in blocks:
        first = block[0]
        if is_heading(first[2]):
            heading = first[2].strip()
            block = block[1:]  # heading line is context only
            if not block:
                continue
        start = block[0][0]
        end = block[-1][1]
        segments.append(
            Segment(
                doc_id=doc_id,
                start=start,
                end=end,
                text=text[start:end],
                heading_context=heading,
            )
        )
    return segments


def _segment_lines(doc_id: str, text: str) -> list[Segment]:
    return [
        Segment(doc_id=doc_id, start=start, end=end, text=raw)
        for start, end, raw in _lines_with_offsets(text)
        if raw.strip()
    ]


RULE_SETS = {
    "paragraph": _segment_paragraphs,
    "line": _segment_lines,
}

DEFAULT_RULE_SET = "paragraph"


def segment_document(
    text: str, rule_set: str = DEFAULT_RULE_SET, *, doc_id: str = "doc"
) -> list[Segment]:
    """Order-preserving, non-overlapping segmentation; text[start:end] is
    always exactly the segment text."""
    if not text:
        raise ValidationError("cannot segment empty text")
    try:
        rule = RULE_SETS[rule_set]
    except KeyError:
        raise ValidationError(f"unknown segmentation rule set {rule_set!r}") from None
    return rule(doc_id, text)
