"""Entity <-> payload codecs and event application.

A payload is the canonical dict form of an entity or state change. The same
payloads serve three masters: log records on disk, transcription plans
(validated then committed as a batch), and the read-side views the service
and CLI return. Keeping one codec per entity is what makes "CLI output ==
endpoint payload == stored record" hold by construction.
"""

from datetime import datetime

from .canonical import format_timestamp, parse_timestamp
from .errors import ValidationError
from .model import (
    InformationElement,
    Link,
    ProvenanceRecord,
    SourceDocument,
    SourceSpan,
    TaskInstance,
    parse_ie_type,
    parse_link_kind,
    parse_link_status,
)
from .warehouse import Warehouse

KIND_DOCUMENT = "document"
KIND_TI = "ti"
KIND_ELEMENT = "element"
KIND_LINK = "link"
KIND_REVIEW = "review"
KIND_DEPRECATE = "deprecate"

RECORD_KINDS = (
    KIND_DOCUMENT,
    KIND_TI,
    KIND_ELEMENT,
    KIND_LINK,
    KIND_REVIEW,
    KIND_DEPRECATE,
)

Event = tuple[str, dict]


# -- payload builders ------------------------------------------------------


def span_payload(span: SourceSpan | None) -> dict | None:
    if span is None:
        return None
    return {"doc": span.doc_id, "start": span.start, "end": span.end}


def provenance_payload(p: ProvenanceRecord) -> dict:
    return {
        "how": p.how,
        "where": p.where,
        "what": p.what,
        "when": format_timestamp(p.when),
        "why": p.why,
        "which": span_payload(p.which),
        "whom": p.whom,
    }


def document_payload(doc: SourceDocument) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "author": doc.author,
        "text_hash": doc.text_hash,
    }


def ti_payload(ti: TaskInstance) -> dict:
    """Log form of a task instance; membership is rebuilt from element order."""
    return {
        "id": ti.id,
        "kw_type": ti.kw_type,
        "title": ti.title,
        "created_at": format_timestamp(ti.created_at),
    }


def element_payload(element: InformationElement) -> dict:
    return {
        "id": element.id,
        "ti_id": element.ti_id,
        "ie_type": element.ie_type.value,
        "principal_content": element.principal_content,
        "provenance": provenance_payload(element.provenance),
        "tags": sorted(element.tags),
        "created_at": format_timestamp(element.created_at),
        "deprecated": element.deprecated,
    }


def link_payload(link: Link) -> dict:
    return {
        "id": link.id,
        "src": link.src,
        "dst": link.dst,
        "kind": link.kind.value,
        "annotation": link.annotation,
        "status": link.status.value,
    }


def review_payload(link_id: str, decision: str) -> dict:
    return {"link_id": link_id, "decision": decision}


def deprecate_payload(element_id: str, reason: str) -> dict:
    return {"element_id": element_id, "reason": reason}


# -- payload parsers -------------------------------------------------------


def _require(payload: dict, key: str, types) -> object:
    if key not in payload:
        raise ValidationError(f"payload missing {key!r}")
    value = payload[key]
    if not isinstance(value, types):
        raise ValidationError(f"payload field {key!r} has wrong type")
    return value


def _timestamp(payload: dict, key: str) -> datetime:
    raw = _require(payload, key, str)
    try:
        return parse_timestamp(raw)
    except ValueError:
        raise ValidationError(f"payload field {key!r} is not a canonical timestamp") from None


def span_from_payload(raw: dict | None) -> SourceSpan | None:
    if raw is None:
        return None
    return SourceSpan(
        doc_id=str(_require(raw, "doc", str)),
        start=int(_require(raw, "start", int)),
        end=int(_require(raw, "end", int)),
    )


def provenance_from_payload(raw: dict) -> ProvenanceRecord:
    which = raw.get("which")
    if which is not None and not isinstance(which, dict):
        raise ValidationError("payload field 'which' has wrong type")
    return ProvenanceRecord(
        how=str(_require(raw, "how", str)),
        where=str(_require(raw, "where", str)),
        what=str(_require(raw, "what", str)),
        when=_timestamp(raw, "when"),
        why=str(_require(raw, "why", str)),
        which=span_from_payload(which),
        whom=str(_require(raw, "whom", str)),
    )


# -- event application -------------------------------------------------------


def stage_event(warehouse: Warehouse, kind: str, payload: dict):
    """Validate one event against the warehouse; returns the staged delta."""
    if kind == KIND_DOCUMENT:
        doc = SourceDocument(
            id=str(_require(payload, "id", str)),
            title=str(_require(payload, "title", str)),
            author=str(_require(payload, "author", str)),
            text_hash=str(_require(payload, "text_hash", str)),
        )
        return warehouse.stage_document(doc)
    if kind == KIND_TI:
        return warehouse.stage_task_instance(
            str(_require(payload, "kw_type", str)),
            str(_require(payload, "title", str)),
            ti_id=str(_require(payload, "id", str)),
            created_at=_timestamp(payload, "created_at"),
        )
    if kind == KIND_ELEMENT:
        provenance_raw = _require(payload, "provenance", dict)
        tags_raw = _require(payload, "tags", list)
        return warehouse.stage_element(
            str(_require(payload, "ti_id", str)),
            parse_ie_type(str(_require(payload, "ie_type", str))),
            str(_require(payload, "principal_content", str)),
            provenance_from_payload(provenance_raw),
            frozenset(str(t) for t in tags_raw),
            element_id=str(_require(payload, "id", str)),
            created_at=_timestamp(payload, "created_at"),
            deprecated=bool(payload.get("deprecated", False)),
        )
    if kind == KIND_LINK:
        annotation = payload.get("annotation")
        if annotation is not None and not isinstance(annotation, str):
            raise ValidationError("payload field 'annotation' has wrong type")
        return warehouse.stage_link(
            str(_require(payload, "src", str)),
            str(_require(payload, "dst", str)),
            parse_link_kind(str(_require(payload, "kind", str))),
            annotation,
            parse_link_status(str(_require(payload, "status", str))),
            link_id=str(_require(payload, "id", str)),
        )
    if kind == KIND_REVIEW:
        return warehouse.stage_review(
            str(_require(payload, "link_id", str)),
            str(_require(payload, "decision", str)),
        )
    if kind == KIND_DEPRECATE:
        return warehouse.stage_deprecate(
            str(_require(payload, "element_id", str)),
            str(_require(payload, "reason", str)),
        )
    raise ValidationError(f"unknown record kind {kind!r}")


def commit_event(warehouse: Warehouse, kind: str, staged) -> None:
    if kind == KIND_DOCUMENT:
        warehouse.commit_document(staged)
    elif kind == KIND_TI:
        warehouse.commit_task_instance(staged)
    elif kind == KIND_ELEMENT:
        warehouse.commit_element(staged)
    elif kind == KIND_LINK:
        warehouse.commit_link(staged)
    elif kind == KIND_REVIEW:
        warehouse.commit_review(staged)
    elif kind == KIND_DEPRECATE:
        warehouse.commit_deprecate(staged)
    else:  # stage_event already rejects unknown kinds
        raise ValidationError(f"unknown record kind {kind!r}")


def apply_event(warehouse: Warehouse, kind: str, payload: dict):
    staged = stage_event(warehouse, kind, payload)
    commit_event(warehouse, kind, staged)
    return staged


def snapshot_events(warehouse: Warehouse) -> list[Event]:
    """Canonical event sequence that rebuilds the warehouse's current state.

    Deterministic regardless of mutation history: documents, TIs and links
    sorted by id; elements grouped per TI in membership order (which is part
    of the state). Reviews and deprecations are already folded into the
    entities, so replaying this list yields a field-wise equal warehouse.
    """
    events: list[Event] = []
    for doc_id in sorted(warehouse.documents):
        events.append((KIND_DOCUMENT, document_payload(warehouse.documents[doc_id])))
    for ti_id in sorted(warehouse.tis):
        events.append((KIND_TI, ti_payload(warehouse.tis[ti_id])))
    for ti_id in sorted(warehouse.tis):
        for member_id in warehouse.tis[ti_id].member_ids:
            events.append((KIND_ELEMENT, element_payload(warehouse.elements[member_id])))
    for link_id in sorted(warehouse.links):
        events.append((KIND_LINK, link_payload(warehouse.links[link_id])))
    return events
