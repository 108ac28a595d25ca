"""Append-only persistence for the warehouse.

One record per line: ``seq TAB kind TAB sha256(payload) TAB payload`` with the
payload in canonical JSON (sorted keys, escaped control characters, so a line
never contains a literal tab or newline). The first line is a header record
(seq 0) declaring the format version. Replaying records in sequence order
rebuilds the warehouse; every replayed record passes through the same
validation as a live mutation.

Durability contract: ``append`` buffers, ``flush`` makes records durable.
The store wrapper appends and flushes *before* committing to memory, so an
I/O failure leaves the in-memory warehouse untouched.
"""

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .canonical import canonical_dumps, content_hash, text_hash
from .errors import (
    ConstraintError,
    CorruptionError,
    DuplicateError,
    NotFoundError,
    StateError,
    StorageError,
    ValidationError,
    VersionError,
)
from .model import IeType, LinkKind, LinkStatus, ProvenanceRecord, SourceDocument
from .records import (
    KIND_DEPRECATE,
    KIND_DOCUMENT,
    KIND_ELEMENT,
    KIND_LINK,
    KIND_REVIEW,
    KIND_TI,
    RECORD_KINDS,
    Event,
    commit_event,
    deprecate_payload,
    document_payload,
    element_payload,
    link_payload,
    review_payload,
    snapshot_events,
    stage_event,
    ti_payload,
)
from .warehouse import Warehouse

FORMAT_VERSION = 1
KIND_HEADER = "header"

_REPLAY_ERRORS = (ValidationError, ConstraintError, DuplicateError, NotFoundError, StateError)


@dataclass(frozen=True)
class LogRecord:
    seq: int
    kind: str
    payload: dict


def _record_line(seq: int, kind: str, payload: dict) -> str:
    body = canonical_dumps(payload)
    return f"{seq}\t{kind}\t{content_hash(body)}\t{body}\n"


def _parse_line(line: str, expected_seq: int) -> LogRecord:
    parts = line.split("\t", 3)
    if len(parts) != 4:
        raise CorruptionError(
            f"malformed record at seq {expected_seq}", seq=expected_seq
        )
    raw_seq, kind, digest, body = parts
    try:
        seq = int(raw_seq)
    except ValueError:
        raise CorruptionError(
            f"non-numeric seq at record {expected_seq}", seq=expected_seq
        ) from None
    if seq != expected_seq:
        raise CorruptionError(
            f"sequence break: expected {expected_seq}, found {seq}", seq=expected_seq
        )
    if content_hash(body) != digest:
        raise CorruptionError(f"hash mismatch at seq {seq}", seq=seq)
    if kind != KIND_HEADER and kind not in RECORD_KINDS:
        raise VersionError(f"unknown record kind {kind!r} at seq {seq}")
    try:
        payload = json.loads(body)
    except ValueError:
        raise CorruptionError(f"unparseable payload at seq {seq}", seq=seq) from None
    if not isinstance(payload, dict):
        raise CorruptionError(f"payload at seq {seq} is not an object", seq=seq)
    return LogRecord(seq=seq, kind=kind, payload=payload)


def read_records(path: str | Path) -> list[LogRecord]:
    path = Path(path)
    if not path.exists():
        raise StorageError(f"no warehouse log at {path}")
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptionError(f"log is not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorruptionError("log is empty (missing header)", seq=0)
    records = [_parse_line(line, seq) for seq, line in enumerate(lines)]
    header = records[0]
    if header.kind != KIND_HEADER:
        raise CorruptionError("first record is not a header", seq=0)
    if header.payload.get("format_version") != FORMAT_VERSION:
        raise VersionError(
            f"unsupported format version {header.payload.get('format_version')!r}"
        )
    return records


def replay_records(records: list[LogRecord]) -> Warehouse:
    warehouse = Warehouse()
    for record in records:
        if record.kind == KIND_HEADER:
            continue
        try:
            stage = stage_event(warehouse, record.kind, record.payload)
            commit_event(warehouse, record.kind, stage)
        except _REPLAY_ERRORS as exc:
            raise CorruptionError(
                f"record {record.seq} failed replay: {exc}", seq=record.seq
            ) from exc
    return warehouse


def load(path: str | Path) -> Warehouse:
    return replay_records(read_records(path))


def save_bytes(warehouse: Warehouse, *, history: str | None = None) -> bytes:
    """Canonical snapshot serialization: equal states give equal bytes."""
    header: dict = {"format_version": FORMAT_VERSION}
    if history is not None:
        header["history"] = history
    lines = [_record_line(0, KIND_HEADER, header)]
    for seq, (kind, payload) in enumerate(snapshot_events(warehouse), start=1):
        lines.append(_record_line(seq, kind, payload))
    return "".join(lines).encode("utf-8")


def save(warehouse: Warehouse, path: str | Path) -> int:
    data = save_bytes(warehouse)
    Path(path).write_bytes(data)
    return len(data)


def compact(src_path: str | Path, dst_path: str | Path) -> Path:
    """Fold reviews/deprecations into terminal entity state.

    The compacted log carries a digest of the full pre-compaction log in its
    header, so the discarded history stays verifiable. Compacting an
    already-compact log is a verbatim copy (idempotent).
    """
    src_path, dst_path = Path(src_path), Path(dst_path)
    raw = src_path.read_bytes()
    records = read_records(src_path)
    warehouse = replay_records(records)
    events = snapshot_events(warehouse)
    already_compact = (
        "history" in records[0].payload
        and [(r.kind, r.payload) for r in records[1:]] == list(events)
    )
    if already_compact:
        dst_path.write_bytes(raw)
        return dst_path
    history = hashlib.sha256(raw).hexdigest()
    dst_path.write_bytes(save_bytes(warehouse, history=history))
    return dst_path


class FileLock:
    """Advisory exclusive lock: `<log path>.lock` holding the owner's pid."""

    def __init__(self, target: str | Path):
        self.path = Path(str(target) + ".lock")
        self._held = False

    def acquire(self) -> "FileLock":
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StorageError(
                f"warehouse is locked by another process (remove {self.path} if stale)"
            ) from None
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        self._held = True
        return self

    def release(self) -> None:
        if self._held:
            self.path.unlink(missing_ok=True)
            self._held = False


class WarehouseLog:
    """Append handle over one log file; buffered until flush."""

    def __init__(self, path: str | Path, next_seq: int):
        self.path = Path(path)
        self._next_seq = next_seq
        self._pending: list[str] = []
        self._fh = open(self.path, "ab")

    @classmethod
    def create(cls, path: str | Path) -> "WarehouseLog":
        path = Path(path)
        if path.exists():
            raise StorageError(f"log already exists at {path}")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.touch()
        log = cls(path, next_seq=0)
        log._pending.append(_record_line(0, KIND_HEADER, {"format_version": FORMAT_VERSION}))
        log._next_seq = 1
        log.flush()
        return log

    @classmethod
    def open(cls, path: str | Path) -> tuple["WarehouseLog", list[LogRecord]]:
        records = read_records(path)
        return cls(path, next_seq=records[-1].seq + 1), records

    @property
    def next_seq(self) -> int:
        return self._next_seq

    @property
    def record_count(self) -> int:
        """Appended records, header excluded."""
        return self._next_seq - 1

    def append(self, kind: str, payload: dict) -> int:
        if kind not in RECORD_KINDS:
            raise ValidationError(f"unknown record kind {kind!r}")
        seq = self._next_seq
        self._pending.append(_record_line(seq, kind, payload))
        self._next_seq += 1
        return seq

    def flush(self) -> int:
        if self._fh.closed:
            raise StorageError("log is closed")
        data = "".join(self._pending).encode("utf-8")
        if data:
            self._fh.write(data)
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._pending.clear()
        return len(data)

    def rollback_pending(self) -> None:
        """Drop unflushed records (after a failed flush), rewinding seq."""
        self._next_seq -= len(self._pending)
        self._pending.clear()

    def close(self) -> None:
        if not self._fh.closed:
            self.flush()
            self._fh.close()


class WarehouseStore:
    """Single-writer handle: stage -> append -> flush -> commit, per mutation.

    Batch mutations (transcription plans) are dry-run against a clone first,
    then appended and committed as one flush; either everything lands or
    nothing does.
    """

    def __init__(self, path: Path, warehouse: Warehouse, log: WarehouseLog, lock: FileLock):
        self.path = path
        self.warehouse = warehouse
        self.log = log
        self._lock = lock
        self._closed = False

    @classmethod
    def create(cls, path: str | Path) -> "WarehouseStore":
        path = Path(path)
        lock = FileLock(path).acquire()
        try:
            log = WarehouseLog.create(path)
        except Exception:
            lock.release()
            raise
        return cls(path, Warehouse(), log, lock)

    @classmethod
    def open(cls, path: str | Path) -> "WarehouseStore":
        path = Path(path)
        lock = FileLock(path).acquire()
        try:
            log, records = WarehouseLog.open(path)
            warehouse = replay_records(records)
        except Exception:
            lock.release()
            raise
        return cls(path, warehouse, log, lock)

    def close(self) -> None:
        if not self._closed:
            self.log.close()
            self._lock.release()
            self._closed = True

    def __enter__(self) -> "WarehouseStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- write path --------------------------------------------------------

    def _write(self, kind: str, payload: dict, staged):
        self.log.append(kind, payload)
        try:
            self.log.flush()
        except Exception:
            self.log.rollback_pending()
            raise
        commit_event(self.warehouse, kind, staged)
        return staged

    def register_document(self, doc_id: str, title: str, author: str, text: str):
        doc = SourceDocument(id=doc_id, title=title, author=author, text_hash=text_hash(text))
        staged = self.warehouse.stage_document(doc)
        if staged is None:  # identical document already registered
            return self.warehouse.documents[doc_id]
        return self._write(KIND_DOCUMENT, document_payload(staged), staged)

    def create_task_instance(self, kw_type: str, title: str, **kwargs):
        ti = self.warehouse.stage_task_instance(kw_type, title, **kwargs)
        return self._write(KIND_TI, ti_payload(ti), ti)

    def add_element(
        self,
        ti_id: str,
        ie_type: IeType,
        principal_content: str,
        provenance: ProvenanceRecord,
        tags: frozenset[str] = frozenset(),
        **kwargs,
    ):
        element = self.warehouse.stage_element(
            ti_id, ie_type, principal_content, provenance, tags, **kwargs
        )
        return self._write(KIND_ELEMENT, element_payload(element), element)

    def add_link(
        self,
        src: str,
        dst: str,
        kind: LinkKind,
        annotation: str | None = None,
        status: LinkStatus = LinkStatus.CONFIRMED,
        **kwargs,
    ):
        link = self.warehouse.stage_link(src, dst, kind, annotation, status, **kwargs)
        return self._write(KIND_LINK, link_payload(link), link)

    def review_link(self, link_id: str, decision: str):
        staged = self.warehouse.stage_review(link_id, decision)
        return self._write(KIND_REVIEW, review_payload(link_id, decision), staged)

    def deprecate_element(self, element_id: str, reason: str):
        staged = self.warehouse.stage_deprecate(element_id, reason)
        if staged is None:  # already deprecated: idempotent no-op
            return self.warehouse.elements[element_id]
        self._write(KIND_DEPRECATE, deprecate_payload(element_id, reason), staged)
        return staged

    def apply_batch(self, events: list[Event]) -> None:
        """All-or-nothing application of a pre-built event list."""
        scratch = self.warehouse.clone()
        for kind, payload in events:
            stage = stage_event(scratch, kind, payload)
            commit_event(scratch, kind, stage)
        for kind, payload in events:
            self.log.append(kind, payload)
        try:
            self.log.flush()
        except Exception:
            self.log.rollback_pending()
            raise
        for kind, payload in events:
            stage = stage_event(self.warehouse, kind, payload)
            commit_event(self.warehouse, kind, stage)
