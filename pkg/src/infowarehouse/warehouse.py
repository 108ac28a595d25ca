"""In-memory store of the element network with constraint enforcement.

Every mutation is split into a ``stage_*`` step (validate everything, build
the would-be entity, touch nothing) and a ``commit_*`` step (apply, cannot
fail). The convenience methods used by most callers run both; the storage
layer calls them separately so it can write the log record between the two
(write-ahead discipline). A rejected operation therefore never leaves a
partial mutation behind.

Deletion does not exist. Elements are deprecated, candidate links are
rejected; both stay queryable for audit so that no provenance record ever
points at a hole.
"""

import dataclasses
from datetime import datetime

from .canonical import now_utc, text_hash
from .errors import (
    ConstraintError,
    DuplicateError,
    NotFoundError,
    StateError,
    ValidationError,
)
from .ids import IdGenerator
from .model import (
    IeType,
    InformationElement,
    Link,
    LinkKind,
    LinkStatus,
    ProvenanceRecord,
    SourceDocument,
    TaskInstance,
    Violation,
    validate_kw_type,
)

DEPRECATION_MARK = " | deprecated: "


class Warehouse:
    def __init__(self, id_generator: IdGenerator | None = None):
        self.elements: dict[str, InformationElement] = {}
        self.links: dict[str, Link] = {}
        self.tis: dict[str, TaskInstance] = {}
        self.documents: dict[str, SourceDocument] = {}
        # link ids per element per kind, all statuses; queries filter
        self._out: dict[str, dict[LinkKind, set[str]]] = {}
        self._in: dict[str, dict[LinkKind, set[str]]] = {}
        # ordered (src, dst, kind) of live (non-rejected) links
        self._pairs: set[tuple[str, str, LinkKind]] = set()
        self._ids = id_generator or IdGenerator()

    # -- lookups ---------------------------------------------------------

    def get_element(self, element_id: str) -> InformationElement:
        try:
            return self.elements[element_id]
        except KeyError:
            raise NotFoundError(
                f"no element {element_id!r}", subject_id=element_id
            ) from None

    def get_task_instance(self, ti_id: str) -> TaskInstance:
        try:
            return self.tis[ti_id]
        except KeyError:
            raise NotFoundError(f"no task instance {ti_id!r}", subject_id=ti_id) from None

    def get_link(self, link_id: str) -> Link:
        try:
            return self.links[link_id]
        except KeyError:
            raise NotFoundError(f"no link {link_id!r}", subject_id=link_id) from None

    def get_document(self, doc_id: str) -> SourceDocument:
        try:
            return self.documents[doc_id]
        except KeyError:
            raise NotFoundError(f"no document {doc_id!r}", subject_id=doc_id) from None

    def has_id(self, candidate: str) -> bool:
        return (
            candidate in self.elements
            or candidate in self.links
            or candidate in self.tis
        )

    def new_id(self) -> str:
        return self._ids.unique_id(self.has_id)

    def links_out(self, element_id: str, kind: LinkKind) -> set[str]:
        return self._out.get(element_id, {}).get(kind, set())

    def links_in(self, element_id: str, kind: LinkKind) -> set[str]:
        return self._in.get(element_id, {}).get(kind, set())

    # -- documents -------------------------------------------------------

    def stage_document(self, doc: SourceDocument) -> SourceDocument | None:
        """Returns None when the identical document is already registered."""
        if not doc.id:
            raise ValidationError("document id must be non-empty")
        if not doc.title:
            raise ValidationError("document title must be non-empty")
        existing = self.documents.get(doc.id)
        if existing is not None:
            if existing == doc:
                return None
            raise DuplicateError(
                f"document {doc.id!r} already registered with different content",
                subject_id=doc.id,
            )
        return doc

    def commit_document(self, doc: SourceDocument | None) -> None:
        if doc is not None:
            self.documents[doc.id] = doc

    def register_document(
        self, doc_id: str, title: str, author: str, text: str
    ) -> SourceDocument:
        doc = SourceDocument(id=doc_id, title=title, author=author, text_hash=text_hash(text))
        staged = self.stage_document(doc)
        self.commit_document(staged)
        return self.documents[doc_id]

    # -- task instances ----------------------------------------------------

    def stage_task_instance(
        self,
        kw_type: str,
        title: str,
        *,
        ti_id: str | None = None,
        created_at: datetime | None = None,
    ) -> TaskInstance:
        validate_kw_type(kw_type)
        if not title.strip():
            raise ValidationError("task instance title must be non-empty")
        ti_id = ti_id or self.new_id()
        if self.has_id(ti_id):
            raise DuplicateError(f"id {ti_id!r} already in use", subject_id=ti_id)
        return TaskInstance(
            id=ti_id,
            kw_type=kw_type,
            title=title,
            created_at=created_at or now_utc(),
        )

    def commit_task_instance(self, ti: TaskInstance) -> None:
        self.tis[ti.id] = ti

    def create_task_instance(
        self,
        kw_type: str,
        title: str,
        *,
        ti_id: str | None = None,
        created_at: datetime | None = None,
    ) -> TaskInstance:
        ti = self.stage_task_instance(kw_type, title, ti_id=ti_id, created_at=created_at)
        self.commit_task_instance(ti)
        return ti

    # -- elements ----------------------------------------------------------

    def stage_element(
        self,
        ti_id: str,
        ie_type: IeType,
        principal_content: str,
        provenance: ProvenanceRecord,
        tags: frozenset[str] = frozenset(),
        *,
        element_id: str | None = None,
        created_at: datetime | None = None,
        deprecated: bool = False,
    ) -> InformationElement:
        if ti_id not in self.tis:
            raise NotFoundError(f"no task instance {ti_id!r}", subject_id=ti_id)
        if not principal_content:
            raise ValidationError("principal content must be non-empty")
        provenance.check()
        if provenance.which is not None and provenance.which.doc_id not in self.documents:
            raise ValidationError(
                f"provenance span names unregistered document {provenance.which.doc_id!r}"
            )
        tags = frozenset(tags)
        if any(not t.strip() for t in tags):
            raise ValidationError("tags must be non-empty terms")
        element_id = element_id or self.new_id()
        if self.has_id(element_id):
            raise DuplicateError(f"id {element_id!r} already in use", subject_id=element_id)
        return InformationElement(
            id=element_id,
            ti_id=ti_id,
            ie_type=ie_type,
            principal_content=principal_content,
            provenance=provenance,
            tags=tags,
            created_at=created_at or now_utc(),
            deprecated=deprecated,
        )

    def commit_element(self, element: InformationElement) -> None:
        self.elements[element.id] = element
        self.tis[element.ti_id].member_ids.append(element.id)

    def add_element(
        self,
        ti_id: str,
        ie_type: IeType,
        principal_content: str,
        provenance: ProvenanceRecord,
        tags: frozenset[str] = frozenset(),
        *,
        element_id: str | None = None,
        created_at: datetime | None = None,
        deprecated: bool = False,
    ) -> InformationElement:
        element = self.stage_element(
            ti_id,
            ie_type,
            principal_content,
            provenance,
            tags,
            element_id=element_id,
            created_at=created_at,
            deprecated=deprecated,
        )
        self.commit_element(element)
        return element

    # -- links -------------------------------------------------------------

    def stage_link(
        self,
        src: str,
        dst: str,
        kind: LinkKind,
        annotation: str | None = None,
        status: LinkStatus = LinkStatus.CONFIRMED,
        *,
        link_id: str | None = None,
    ) -> Link:
        if src not in self.elements:
            raise NotFoundError(f"no element {src!r}", subject_id=src)
        if dst not in self.elements:
            raise NotFoundError(f"no element {dst!r}", subject_id=dst)
        if src == dst:
            raise ValidationError("self-links are not allowed", subject_id=src)
        live = status is not LinkStatus.REJECTED
        if live and (src, dst, kind) in self._pairs:
            raise DuplicateError(
                f"{kind.value} link {src} -> {dst} already exists"
            )
        if kind is LinkKind.CREATIONAL:
            src_ti = self.elements[src].ti_id
            dst_ti = self.elements[dst].ti_id
            if src_ti != dst_ti:
                raise ConstraintError(
                    "creational links may not cross task instance boundaries",
                    rule="creational-cross-ti",
                    subject_id=src,
                )
            if live and self._creational_reaches(dst, src):
                raise ConstraintError(
                    f"creational link {src} -> {dst} would close a cycle",
                    rule="creational-cycle",
                    subject_id=src,
                )
        link_id = link_id or self.new_id()
        if self.has_id(link_id):
            raise DuplicateError(f"id {link_id!r} already in use", subject_id=link_id)
        return Link(
            id=link_id, src=src, dst=dst, kind=kind, annotation=annotation, status=status
        )

    def commit_link(self, link: Link) -> None:
        self.links[link.id] = link
        self._out.setdefault(link.src, {}).setdefault(link.kind, set()).add(link.id)
        self._in.setdefault(link.dst, {}).setdefault(link.kind, set()).add(link.id)
        if link.status is not LinkStatus.REJECTED:
            self._pairs.add((link.src, link.dst, link.kind))

    def add_link(
        self,
        src: str,
        dst: str,
        kind: LinkKind,
        annotation: str | None = None,
        status: LinkStatus = LinkStatus.CONFIRMED,
        *,
        link_id: str | None = None,
    ) -> Link:
        link = self.stage_link(src, dst, kind, annotation, status, link_id=link_id)
        self.commit_link(link)
        return link

    def _creational_reaches(self, start: str, target: str) -> bool:
        """True if `target` is reachable from `start` over live creational links."""
        frontier = [start]
        seen = {start}
        while frontier:
            node = frontier.pop()
            for link_id in self.links_out(node, LinkKind.CREATIONAL):
                link = self.links[link_id]
                if link.status is LinkStatus.REJECTED:
                    continue
                if link.dst == target:
                    return True
                if link.dst not in seen:
                    seen.add(link.dst)
                    frontier.append(link.dst)
        return False

    # -- review ------------------------------------------------------------

    def stage_review(self, link_id: str, decision: str) -> Link:
        if decision not in ("confirm", "reject"):
            raise ValidationError(f"decision must be confirm or reject, got {decision!r}")
        link = self.get_link(link_id)
        if link.status is not LinkStatus.PENDING_REVIEW:
            raise StateError(
                f"link {link_id!r} is already {link.status.value}", subject_id=link_id
            )
        new_status = (
            LinkStatus.CONFIRMED if decision == "confirm" else LinkStatus.REJECTED
        )
        return dataclasses.replace(link, status=new_status)

    def commit_review(self, link: Link) -> None:
        self.links[link.id] = link
        if link.status is LinkStatus.REJECTED:
            self._pairs.discard((link.src, link.dst, link.kind))

    def review_link(self, link_id: str, decision: str) -> Link:
        link = self.stage_review(link_id, decision)
        self.commit_review(link)
        return link

    # -- deprecation ---------------------------------------------------------

    def stage_deprecate(self, element_id: str, reason: str) -> InformationElement | None:
        """Returns None when the element is already deprecated (no-op)."""
        element = self.get_element(element_id)
        if not reason.strip():
            raise ValidationError("deprecation reason must be non-empty")
        if element.deprecated:
            return None
        provenance = dataclasses.replace(
            element.provenance, why=element.provenance.why + DEPRECATION_MARK + reason
        )
        return dataclasses.replace(element, deprecated=True, provenance=provenance)

    def commit_deprecate(self, element: InformationElement | None) -> None:
        if element is not None:
            self.elements[element.id] = element

    def deprecate_element(self, element_id: str, reason: str) -> InformationElement:
        element = self.stage_deprecate(element_id, reason)
        self.commit_deprecate(element)
        return self.elements[element_id]

    # -- integrity -----------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Full integrity scan; returns every broken invariant, empty when sound."""
        found: list[Violation] = []

        def report(code: str, subject: str, message: str) -> None:
            found.append(Violation(code=code, subject_id=subject, message=message))

        for key, entity_map in (
            ("element", self.elements),
            ("link", self.links),
            ("ti", self.tis),
            ("document", self.documents),
        ):
            for map_key, entity in entity_map.items():
                if map_key != entity.id:
                    report("key-mismatch", map_key, f"{key} stored under wrong key {map_key!r}")

        for element in self.elements.values():
            ti = self.tis.get(element.ti_id)
            if ti is None:
                report("unknown-ti", element.id, f"element {element.id} names missing TI {element.ti_id}")
            elif element.id not in ti.member_ids:
                report(
                    "membership-missing",
                    element.id,
                    f"element {element.id} carries ti_id {ti.id} but is not a member",
                )
            if not element.principal_content:
                report("empty-content", element.id, f"element {element.id} has empty content")
            try:
                element.provenance.check()
            except ValidationError as exc:
                report("invalid-provenance", element.id, str(exc))
            else:
                span = element.provenance.which
                if span is not None and span.doc_id not in self.documents:
                    report(
                        "unknown-document",
                        element.id,
                        f"element {element.id} span names unregistered document {span.doc_id!r}",
                    )

        for ti in self.tis.values():
            seen: set[str] = set()
            for member_id in ti.member_ids:
                if member_id in seen:
                    report("membership-duplicate", ti.id, f"TI {ti.id} lists {member_id} twice")
                seen.add(member_id)
                member = self.elements.get(member_id)
                if member is None:
                    report("membership-dangling", ti.id, f"TI {ti.id} lists missing element {member_id}")
                elif member.ti_id != ti.id:
                    report(
                        "membership-mismatch",
                        ti.id,
                        f"TI {ti.id} lists element {member_id} whose ti_id is {member.ti_id}",
                    )

        live_pairs: dict[tuple[str, str, LinkKind], str] = {}
        for link in self.links.values():
            src = self.elements.get(link.src)
            dst = self.elements.get(link.dst)
            if src is None:
                report("dangling-endpoint", link.id, f"link {link.id} src {link.src} missing")
            if dst is None:
                report("dangling-endpoint", link.id, f"link {link.id} dst {link.dst} missing")
            if link.src == link.dst:
                report("self-link", link.id, f"link {link.id} joins {link.src} to itself")
            if link.status is not LinkStatus.REJECTED:
                pair = (link.src, link.dst, link.kind)
                if pair in live_pairs:
                    report(
                        "duplicate-link",
                        link.id,
                        f"links {live_pairs[pair]} and {link.id} duplicate {pair}",
                    )
                else:
                    live_pairs[pair] = link.id
            if (
                link.kind is LinkKind.CREATIONAL
                and src is not None
                and dst is not None
                and src.ti_id != dst.ti_id
            ):
                report(
                    "creational-cross-ti",
                    link.id,
                    f"creational link {link.id} crosses TIs {src.ti_id} -> {dst.ti_id}",
                )

        for ti in self.tis.values():
            if self._has_creational_cycle(ti):
                report("creational-cycle", ti.id, f"TI {ti.id} creational subgraph is cyclic")

        found.extend(self._index_violations())
        return sorted(found, key=lambda v: (v.code, v.subject_id, v.message))

    def _has_creational_cycle(self, ti: TaskInstance) -> bool:
        members = set(ti.member_ids) & set(self.elements)
        edges: dict[str, list[str]] = {m: [] for m in members}
        indegree = {m: 0 for m in members}
        for link in self.links.values():
            if (
                link.kind is LinkKind.CREATIONAL
                and link.status is not LinkStatus.REJECTED
                and link.src in members
                and link.dst in members
            ):
                edges[link.src].append(link.dst)
                indegree[link.dst] += 1
        ready = [m for m in members if indegree[m] == 0]
        removed = 0
        while ready:
            node = ready.pop()
            removed += 1
            for nxt in edges[node]:
                indegree[nxt] -= 1
                if indegree[nxt] == 0:
                    ready.append(nxt)
        return removed != len(members)

    def _index_violations(self) -> list[Violation]:
        expected_out: dict[str, dict[LinkKind, set[str]]] = {}
        expected_in: dict[str, dict[LinkKind, set[str]]] = {}
        for link in self.links.values():
            expected_out.setdefault(link.src, {}).setdefault(link.kind, set()).add(link.id)
            expected_in.setdefault(link.dst, {}).setdefault(link.kind, set()).add(link.id)

        def diff(actual, expected, label):
            problems = []
            keys = set(actual) | set(expected)
            for key in keys:
                for kind in LinkKind:
                    have = actual.get(key, {}).get(kind, set())
                    want = expected.get(key, {}).get(kind, set())
                    if have != want:
                        problems.append(
                            Violation(
                                code="index-mismatch",
                                subject_id=key,
                                message=f"{label} index for {key}/{kind.value} is stale",
                            )
                        )
            return problems

        return diff(self._out, expected_out, "outgoing") + diff(self._in, expected_in, "incoming")

    # -- misc ----------------------------------------------------------------

    def clone(self) -> "Warehouse":
        """Structural copy used to dry-run batched mutations."""
        other = Warehouse(id_generator=self._ids)
        other.elements = dict(self.elements)
        other.links = dict(self.links)
        other.documents = dict(self.documents)
        other.tis = {
            k: dataclasses.replace(ti, member_ids=list(ti.member_ids))
            for k, ti in self.tis.items()
        }
        other._out = {
            k: {kind: set(ids) for kind, ids in kinds.items()}
            for k, kinds in self._out.items()
        }
        other._in = {
            k: {kind: set(ids) for kind, ids in kinds.items()}
            for k, kinds in self._in.items()
        }
        other._pairs = set(self._pairs)
        return other

    def counts(self) -> dict:
        link_counts = {
            kind.value: {status.value: 0 for status in LinkStatus} for kind in LinkKind
        }
        for link in self.links.values():
            link_counts[link.kind.value][link.status.value] += 1
        return {
            "documents": len(self.documents),
            "tis": len(self.tis),
            "elements": {
                "total": len(self.elements),
                "deprecated": sum(1 for e in self.elements.values() if e.deprecated),
            },
            "links": link_counts,
        }
