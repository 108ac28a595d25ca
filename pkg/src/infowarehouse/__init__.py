"""infowarehouse: an append-only warehouse of linked information elements.

Documents are transcribed into task instances holding typed information
elements; elements carry seven-facet provenance and are joined by
creational links (confined to one task instance, acyclic) and reference
links (free to cross). Query operations deliver relevance-ranked search,
link navigation, provenance chains, and basic network analyses, over an
HTTP service or the ``iw`` command line.
"""

__version__ = "0.1.0"

from .errors import (
    ConstraintError,
    CorruptionError,
    DuplicateError,
    ManifestError,
    NotFoundError,
    StateError,
    StorageError,
    ValidationError,
    VersionError,
    WarehouseError,
)
from .model import (
    IeType,
    InformationElement,
    Link,
    LinkKind,
    LinkStatus,
    ProvenanceRecord,
    SourceDocument,
    SourceSpan,
    TaskInstance,
    Violation,
)
from .warehouse import Warehouse

__all__ = [
    "ConstraintError",
    "CorruptionError",
    "DuplicateError",
    "IeType",
    "InformationElement",
    "Link",
    "LinkKind",
    "LinkStatus",
    "ManifestError",
    "NotFoundError",
    "ProvenanceRecord",
    "SourceDocument",
    "SourceSpan",
    "StateError",
    "StorageError",
    "TaskInstance",
    "ValidationError",
    "VersionError",
    "Violation",
    "Warehouse",
    "WarehouseError",
    "__version__",
]
