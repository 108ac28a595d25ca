"""Deterministic citation detection across a document set.

Three patterns raise a reference candidate inside a segment:

  1. "see <title>" where <title> is a registered document title
  2. a verbatim registered document title
  3. a bracketed marker [n], resolved against the corpus document order
     (1-based), the way short document sets cite each other

Overlapping matches keep the longest, earliest, highest-priority one, so
"see Discount Scheme 2004" yields a single candidate rather than one for
the phrase and another for the bare title.
"""

import re
from dataclasses import dataclass

from .segmenter import Segment

_MARKER = re.compile(r"\[(\d+)\]")


@dataclass(frozen=True)
class CandidateReference:
    src_doc_id: str
    src_start: int  # segment start offset within its document
    src_end: int
    evidence: str  # verbatim matched text
    match_offset: int  # offset of the match within the segment
    dst_doc_id: str | None  # None when a [n] marker points outside the corpus
    marker_ordinal: int | None = None


def detect_references(
    segments: list[Segment], corpus_titles: list[tuple[str, str]]
) -> list[CandidateReference]:
    """Scan segments for citation patterns against (doc_id, title) pairs.

    Results are ordered by (source doc, segment span, match position).
    """
    ordered = sorted(segments, key=lambda s: (s.doc_id, s.start))
    candidates: list[CandidateReference] = []
    for segment in ordered:
        # (start, -length, priority) sort makes the greedy pass deterministic
        matches: list[tuple[int, int, int, str, str | None, int | None]] = []
        for doc_id, title in corpus_titles:
            if not title:
                continue
            see_pattern = re.compile(r"[Ss]ee\s+" + re.escape(title))
            for m in see_pattern.finditer(segment.text):
                matches.append((m.start(), m.end(), 0, m.group(0), doc_id, None))
            for m in re.finditer(re.escape(title), segment.text):
                matches.append((m.start(), m.end(), 1, m.group(0), doc_id, None))
        for m in _MARKER.finditer(segment.text):
            ordinal = int(m.group(1))
            dst = (
                corpus_titles[ordinal - 1][0]
                if 1 <= ordinal <= len(corpus_titles)
                else None
            )
            matches.append((m.start(), m.end(), 2, m.group(0), dst, ordinal))

        matches.sort(key=lambda item: (item[0], -(item[1] - item[0]), item[2]))
        taken_until = -1
        for start, end, _, evidence, dst_doc_id, ordinal in matches:
            if start < taken_until:
                continue
            taken_until = end
            candidates.append(
                CandidateReference(
                    src_doc_id=segment.doc_id,
                    src_start=segment.start,
                    src_end=segment.end,
                    evidence=evidence,
                    match_offset=start,
                    dst_doc_id=dst_doc_id,
                    marker_ordinal=ordinal,
                )
            )
    return candidates
