"""Atomic conversion of a manifest's documents into warehouse structures.

One run produces a single new task instance: one element per segment
(excerpt unless overridden), explicit links confirmed, detected references
stored pending review, and provenance filled in from the manifest. The plan
is validated against a clone of the warehouse before anything is applied,
so a failing manifest leaves no trace.
"""

from dataclasses import dataclass, field

from ..canonical import format_timestamp, now_utc, text_hash
from ..errors import ValidationError
from ..ids import IdGenerator
from ..model import (
    UNKNOWN,
    LinkStatus,
    SourceDocument,
    TaskInstance,
)
from ..records import (
    KIND_DOCUMENT,
    KIND_ELEMENT,
    KIND_LINK,
    KIND_TI,
    Event,
    apply_event,
    document_payload,
    ti_payload,
)
from ..warehouse import Warehouse
from .manifest import TranscriptionManifest
from .references import detect_references
from .segmenter import Segment, segment_document


@dataclass
class TranscriptionReport:
    ti_id: str
    element_ids: list[str] = field(default_factory=list)
    confirmed_link_ids: list[str] = field(default_factory=list)
    pending_link_ids: list[str] = field(default_factory=list)
    # (evidence, reason) for candidates that could not become links
    skipped_candidates: list[tuple[str, str]] = field(default_factory=list)


def build_plan(
    manifest: TranscriptionManifest, warehouse: Warehouse
) -> tuple[list[Event], TranscriptionReport]:
    """Compute the full event list for one transcription without touching
    the warehouse. Ids are drawn from the manifest seed in a fixed order,
    which is what makes reruns reproducible."""
    clock = manifest.clock or now_utc()
    ids = IdGenerator(manifest.id_seed)
    planned: set[str] = set()

    def draw() -> str:
        new = ids.unique_id(lambda c: warehouse.has_id(c) or c in planned)
        planned.add(new)
        return new

    events: list[Event] = []

    for doc in manifest.documents:
        entity = SourceDocument(
            id=doc.doc_id,
            title=doc.title,
            author=doc.author,
            text_hash=text_hash(doc.text),
        )
        if warehouse.documents.get(doc.doc_id) == entity:
            continue  # re-ingesting a known document into a new TI
        events.append((KIND_DOCUMENT, document_payload(entity)))

    ti_id = draw()
    report = TranscriptionReport(ti_id=ti_id)
    events.append(
        (
            KIND_TI,
            ti_payload(
                TaskInstance(
                    id=ti_id,
                    kw_type=manifest.kw_type,
                    title=manifest.ti_title,
                    created_at=clock,
                )
            ),
        )
    )

    overrides = {
        (rule.selector.doc_id, rule.selector.index): rule
        for rule in manifest.element_rules
    }

    segments_by_doc: dict[str, list[Segment]] = {}
    element_by_segment: dict[tuple[str, int], str] = {}  # (doc, seg start) -> ie id
    element_by_selector: dict[tuple[str, int], str] = {}  # (doc, index) -> ie id
    all_segments: list[Segment] = []
    for doc in manifest.documents:
        segments = segment_document(doc.text, manifest.rule_set, doc_id=doc.doc_id)
        segments_by_doc[doc.doc_id] = segments
        all_segments.extend(segments)
        for index, segment in enumerate(segments):
            rule = overrides.get((doc.doc_id, index))
            ie_id = draw()
            element_by_segment[(doc.doc_id, segment.start)] = ie_id
            element_by_selector[(doc.doc_id, index)] = ie_id
            report.element_ids.append(ie_id)
            events.append(
                (
                    KIND_ELEMENT,
                    {
                        "id": ie_id,
                        "ti_id": ti_id,
                        "ie_type": rule.ie_type if rule else "excerpt",
                        "principal_content": segment.text,
                        "provenance": {
                            "how": f"transcription:{manifest.rule_set}",
                            "where": str(doc.path),
                            "what": doc.title or UNKNOWN,
                            "when": format_timestamp(doc.date or clock),
                            "why": manifest.ti_title,
                            "which": {
                                "doc": doc.doc_id,
                                "start": segment.start,
                                "end": segment.end,
                            },
                            "whom": doc.author or UNKNOWN,
                        },
                        "tags": sorted(rule.tags) if rule else [],
                        "created_at": format_timestamp(clock),
                        "deprecated": False,
                    },
                )
            )

    for selector_key in overrides:
        if selector_key not in element_by_selector:
            raise ValidationError(
                f"explicit_elements selector {selector_key} matches no segment"
            )

    def resolve(selector) -> str:
        key = (selector.doc_id, selector.index)
        if key not in element_by_selector:
            raise ValidationError(f"link selector {key} matches no segment")
        return element_by_selector[key]

    reference_pairs: set[tuple[str, str]] = set()
    for rule in manifest.link_rules:
        src_id = resolve(rule.src)
        dst_id = resolve(rule.dst)
        link_id = draw()
        if rule.kind == "reference":
            reference_pairs.add((src_id, dst_id))
        report.confirmed_link_ids.append(link_id)
        events.append(
            (
                KIND_LINK,
                {
                    "id": link_id,
                    "src": src_id,
                    "dst": dst_id,
                    "kind": rule.kind,
                    "annotation": rule.annotation,
                    "status": LinkStatus.CONFIRMED.value,
                },
            )
        )

    corpus_titles = [(doc.doc_id, doc.title) for doc in manifest.documents]
    for candidate in detect_references(all_segments, corpus_titles):
        src_id = element_by_segment[(candidate.src_doc_id, candidate.src_start)]
        if candidate.dst_doc_id is None:
            report.skipped_candidates.append(
                (candidate.evidence, "marker points outside the document set")
            )
            continue
        dst_segments = segments_by_doc[candidate.dst_doc_id]
        if not dst_segments:
            report.skipped_candidates.append(
                (candidate.evidence, f"document {candidate.dst_doc_id} has no segments")
            )
            continue
        dst_id = element_by_segment[(candidate.dst_doc_id, dst_segments[0].start)]
        if dst_id == src_id:
            report.skipped_candidates.append((candidate.evidence, "self-reference"))
            continue
        if (src_id, dst_id) in reference_pairs:
            report.skipped_candidates.append((candidate.evidence, "duplicate pair"))
            continue
        reference_pairs.add((src_id, dst_id))
        link_id = draw()
        report.pending_link_ids.append(link_id)
        events.append(
            (
                KIND_LINK,
                {
                    "id": link_id,
                    "src": src_id,
                    "dst": dst_id,
                    "kind": "reference",
                    "annotation": candidate.evidence,
                    "status": LinkStatus.PENDING_REVIEW.value,
                },
            )
        )

    return events, report


def transcribe(manifest: TranscriptionManifest, target) -> TranscriptionReport:
    """Apply a manifest to a Warehouse or a WarehouseStore, atomically.

    The plan is rehearsed on a clone first; only a fully valid plan touches
    the target (and, for stores, the log is flushed before memory changes).
    """
    warehouse = getattr(target, "warehouse", target)
    events, report = build_plan(manifest, warehouse)
    if hasattr(target, "apply_batch"):
        target.apply_batch(events)
    else:
        scratch = warehouse.clone()
        for kind, payload in events:
            apply_event(scratch, kind, payload)
        for kind, payload in events:
            apply_event(warehouse, kind, payload)
    return report
