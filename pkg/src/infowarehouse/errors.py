"""Exception hierarchy shared by every layer.

Each class carries a machine-readable ``code`` that the service and CLI map
onto HTTP statuses and exit codes respectively:

    not_found   unknown id
    validation  malformed or empty input
    constraint  a structural rule of the network was violated
    conflict    duplicate entity or illegal state transition
    storage     I/O failure, corruption, or format-version problems
"""


class WarehouseError(Exception):
    code = "storage"

    def __init__(self, message: str, *, subject_id: str | None = None):
        super().__init__(message)
        self.subject_id = subject_id


class NotFoundError(WarehouseError):
    code = "not_found"


class ValidationError(WarehouseError):
    code = "validation"


class ConstraintError(WarehouseError):
    """A structural rule was broken. ``rule`` names it, e.g. "creational-cross-ti"."""

    code = "constraint"

    def __init__(self, message: str, *, rule: str, subject_id: str | None = None):
        super().__init__(message, subject_id=subject_id)
        self.rule = rule


class DuplicateError(WarehouseError):
    code = "conflict"


class StateError(WarehouseError):
    """Operation is legal in general but not in the entity's current state."""

    code = "conflict"


class StorageError(WarehouseError):
    code = "storage"


class CorruptionError(StorageError):
    """A persisted log failed an integrity check. ``seq`` locates the record."""

    def __init__(self, message: str, *, seq: int | None = None):
        super().__init__(message)
        self.seq = seq


class VersionError(StorageError):
    """The log declares a format or record kind this build does not know."""


class ManifestError(ValidationError):
    """A transcription manifest could not be parsed. ``line`` is 1-based."""

    def __init__(self, message: str, *, line: int | None = None):
        super().__init__(message)
        self.line = line
