"""Manifest files describe one document set to ingest.

A manifest is a UTF-8 JSON object (the same object notation the log records
use) with top-level keys:

    kw_type            knowledge-work type of the new task instance
    ti_title           its title
    documents          [{id, title, author, date?, path}]
    explicit_elements  [{doc, index, ie_type, tags?}]           (optional)
    explicit_links     [{src: {doc, index}, dst: {doc, index},
                         kind, annotation?}]                    (optional)
    options            {rule_set?, clock?, id_seed?}            (optional)

Paths are resolved relative to the manifest file. ``clock`` fixes the
ingestion timestamp and ``id_seed`` the id sequence, which together make a
run reproducible byte for byte.
"""

import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from ..canonical import parse_timestamp_lenient
from ..errors import ManifestError, StorageError
from ..model import parse_ie_type, parse_link_kind, validate_kw_type
from .segmenter import DEFAULT_RULE_SET, RULE_SETS


@dataclass(frozen=True)
class SegmentSelector:
    doc_id: str
    index: int


@dataclass(frozen=True)
class ManifestDocument:
    doc_id: str
    title: str
    author: str
    date: datetime | None
    path: Path
    text: str


@dataclass(frozen=True)
class ElementRule:
    selector: SegmentSelector
    ie_type: str
    tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class LinkRule:
    src: SegmentSelector
    dst: SegmentSelector
    kind: str
    annotation: str | None = None


@dataclass(frozen=True)
class TranscriptionManifest:
    kw_type: str
    ti_title: str
    documents: tuple[ManifestDocument, ...]
    element_rules: tuple[ElementRule, ...] = ()
    link_rules: tuple[LinkRule, ...] = ()
    rule_set: str = DEFAULT_RULE_SET
    clock: datetime | None = None
    id_seed: str | int | None = None


def _expect(raw: dict, key: str, types, where: str):
    if key not in raw:
        raise ManifestError(f"{where}: missing key {key!r}")
    value = raw[key]
    if not isinstance(value, types):
        raise ManifestError(f"{where}: key {key!r} has wrong type")
    return value


def _selector(raw, where: str) -> SegmentSelector:
    if not isinstance(raw, dict):
        raise ManifestError(f"{where}: selector must be an object")
    return SegmentSelector(
        doc_id=str(_expect(raw, "doc", str, where)),
        index=int(_expect(raw, "index", int, where)),
    )


def _parse_date(raw, where: str) -> datetime | None:
    if raw is None:
        return None
    if not isinstance(raw, str):
        raise ManifestError(f"{where}: date must be a string")
    try:
        return parse_timestamp_lenient(raw)
    except ValueError as exc:
        raise ManifestError(f"{where}: {exc}") from None


def parse_manifest(text: str, base_dir: str | Path = ".") -> TranscriptionManifest:
    base_dir = Path(base_dir)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest syntax error: {exc.msg} (line {exc.lineno})", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ManifestError("manifest must be a JSON object")

    kw_type = str(_expect(raw, "kw_type", str, "manifest"))
    validate_kw_type(kw_type)
    ti_title = str(_expect(raw, "ti_title", str, "manifest"))
    if not ti_title.strip():
        raise ManifestError("manifest: ti_title must be non-empty")

    docs_raw = _expect(raw, "documents", list, "manifest")
    if not docs_raw:
        raise ManifestError("manifest: documents must be non-empty")
    documents = []
    seen_ids: set[str] = set()
    for i, doc_raw in enumerate(docs_raw):
        where = f"documents[{i}]"
        if not isinstance(doc_raw, dict):
            raise ManifestError(f"{where}: must be an object")
        doc_id = str(_expect(doc_raw, "id", str, where))
        if not doc_id:
            raise ManifestError(f"{where}: id must be non-empty")
        if doc_id in seen_ids:
            raise ManifestError(f"{where}: duplicate document id {doc_id!r}")
        seen_ids.add(doc_id)
        path = base_dir / str(_expect(doc_raw, "path", str, where))
        try:
            doc_text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StorageError(f"cannot read document file {path}: {exc}") from None
        documents.append(
            ManifestDocument(
                doc_id=doc_id,
                title=str(_expect(doc_raw, "title", str, where)),
                author=str(doc_raw.get("author", "")),
                date=_parse_date(doc_raw.get("date"), where),
                path=path,
                text=doc_text,
            )
        )

    element_rules = []
    for i, rule_raw in enumerate(raw.get("explicit_elements", [])):
        where = f"explicit_elements[{i}]"
        if not isinstance(rule_raw, dict):
            raise ManifestError(f"{where}: must be an object")
        ie_type = str(_expect(rule_raw, "ie_type", str, where))
        parse_ie_type(ie_type)
        tags_raw = rule_raw.get("tags", [])
        if not isinstance(tags_raw, list):
            raise ManifestError(f"{where}: tags must be a list")
        element_rules.append(
            ElementRule(
                selector=_selector(
                    {"doc": rule_raw.get("doc"), "index": rule_raw.get("index")}, where
                ),
                ie_type=ie_type,
                tags=frozenset(str(t) for t in tags_raw),
            )
        )

    link_rules = []
    for i, rule_raw in enumerate(raw.get("explicit_links", [])):
        where = f"explicit_links[{i}]"
        if not isinstance(rule_raw, dict):
            raise ManifestError(f"{where}: must be an object")
        kind = str(_expect(rule_raw, "kind", str, where))
        parse_link_kind(kind)
        annotation = rule_raw.get("annotation")
        if annotation is not None:
            annotation = str(annotation)
        link_rules.append(
            LinkRule(
                src=_selector(rule_raw.get("src"), where),
                dst=_selector(rule_raw.get("dst"), where),
                kind=kind,
                annotation=annotation,
            )
        )

    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise ManifestError("manifest: options must be an object")
    rule_set = str(options.get("rule_set", DEFAULT_RULE_SET))
    if rule_set not in RULE_SETS:
        raise ManifestError(f"manifest: unknown segmentation rule set {rule_set!r}")
    clock = _parse_date(options.get("clock"), "options")
    id_seed = options.get("id_seed")
    if id_seed is not None and not isinstance(id_seed, (str, int)):
        raise ManifestError("manifest: id_seed must be a string or integer")

    selectors_known = {doc.doc_id for doc in documents}
    for rule in element_rules:
        if rule.selector.doc_id not in selectors_known:
            raise ManifestError(
                f"explicit_elements: unknown document {rule.selector.doc_id!r}"
            )
    for rule in link_rules:
        for side in (rule.src, rule.dst):
            if side.doc_id not in selectors_known:
                raise ManifestError(f"explicit_links: unknown document {side.doc_id!r}")

    return TranscriptionManifest(
        kw_type=kw_type,
        ti_title=ti_title,
        documents=tuple(documents),
        element_rules=tuple(element_rules),
        link_rules=tuple(link_rules),
        rule_set=rule_set,
        clock=clock,
        id_seed=id_seed,
    )


def load_manifest(path: str | Path) -> TranscriptionManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read manifest {path}: {exc}") from None
    return parse_manifest(text, base_dir=path.parent)
