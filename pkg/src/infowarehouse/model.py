"""Domain types of the creational-and-reference network.

An InformationElement holds one piece of information (principal content plus
a seven-facet provenance record). Elements belong to exactly one
TaskInstance and are joined by directed links of two kinds:

  creational  src was created to satisfy the need of dst; confined to one TI
  reference   src uses dst without having been created for it; may cross TIs
"""

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

from .errors import ValidationError

UNKNOWN = "unknown"


class IeType(str, Enum):
    GOAL = "goal"
    FINDING = "finding"
    DECISION = "decision"
    EVIDENCE = "evidence"
    ARGUMENT = "argument"
    NOTE = "note"
    EXCERPT = "excerpt"


class LinkKind(str, Enum):
    CREATIONAL = "creational"
    REFERENCE = "reference"


class LinkStatus(str, Enum):
    CONFIRMED = "confirmed"
    PENDING_REVIEW = "pending-review"
    # Terminal state reached only through review; rejected links stay in the
    # log for audit but are invisible to every query.
    REJECTED = "rejected"


KW_TYPES = ("decision-making", "planning", "research", "policy-making")
OTHER_KW_PREFIX = "other:"


def validate_kw_type(kw_type: str) -> str:
    if kw_type in KW_TYPES:
        return kw_type
    if kw_type.startswith(OTHER_KW_PREFIX) and kw_type[len(OTHER_KW_PREFIX):].strip():
        return kw_type
    raise ValidationError(
        f"kw_type must be one of {', '.join(KW_TYPES)} or 'other:<label>', got {kw_type!r}"
    )


def parse_ie_type(value: str) -> IeType:
    try:
        return IeType(value)
    except ValueError:
        raise ValidationError(f"unknown element type: {value!r}") from None


def parse_link_kind(value: str) -> LinkKind:
    try:
        return LinkKind(value)
    except ValueError:
        raise ValidationError(f"unknown link kind: {value!r}") from None


def parse_link_status(value: str) -> LinkStatus:
    try:
        return LinkStatus(value)
    except ValueError:
        raise ValidationError(f"unknown link status: {value!r}") from None


@dataclass(frozen=True)
class SourceSpan:
    """Character range inside a registered source document."""

    doc_id: str
    start: int
    end: int


@dataclass(frozen=True)
class ProvenanceRecord:
    """How / where / what / when / why / which / whom of an element's origin.

    Textual facets are never empty; callers that have nothing to say must
    pass the explicit sentinel "unknown". ``which`` is absent for born-digital
    elements.
    """

    how: str = UNKNOWN
    where: str = UNKNOWN
    what: str = UNKNOWN
    when: datetime | None = None
    why: str = UNKNOWN
    which: SourceSpan | None = None
    whom: str = UNKNOWN

    TEXT_FACETS = ("how", "where", "what", "why", "whom")

    def check(self) -> None:
        for facet in self.TEXT_FACETS:
            if not getattr(self, facet):
                raise ValidationError(
                    f"provenance facet {facet!r} must be non-empty or 'unknown'"
                )
        if self.when is None or self.when.tzinfo is None:
            raise ValidationError("provenance 'when' must be a UTC timestamp")
        if self.which is not None:
            span = self.which
            if not span.doc_id:
                raise ValidationError("provenance span must name a document")
            if span.start < 0 or span.start > span.end:
                raise ValidationError(
                    f"invalid provenance span ({span.start}, {span.end})"
                )


@dataclass(frozen=True)
class InformationElement:
    id: str
    ti_id: str
    ie_type: IeType
    principal_content: str
    provenance: ProvenanceRecord
    tags: frozenset[str] = frozenset()
    created_at: datetime | None = None
    deprecated: bool = False


@dataclass(frozen=True)
class Link:
    id: str
    src: str
    dst: str
    kind: LinkKind
    annotation: str | None = None
    status: LinkStatus = LinkStatus.CONFIRMED


@dataclass
class TaskInstance:
    """Macro element grouping every element produced by one work instance."""

    id: str
    kw_type: str
    title: str
    created_at: datetime
    member_ids: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class SourceDocument:
    """Registry entry for an ingested source document."""

    id: str
    title: str
    author: str
    text_hash: str


@dataclass(frozen=True)
class Violation:
    """One broken invariant found by an integrity scan."""

    code: str
    subject_id: str
    message: str
