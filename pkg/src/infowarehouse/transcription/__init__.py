"""Document-to-network conversion: manifests, segmentation, reference
detection, and the atomic transcribe operation."""

from .manifest import (
    ManifestDocument,
    SegmentSelector,
    TranscriptionManifest,
    load_manifest,
    parse_manifest,
)
from .references import CandidateReference, detect_references
from .segmenter import RULE_SETS, Segment, segment_document
from .transcribe import TranscriptionReport, build_plan, transcribe

__all__ = [
    "CandidateReference",
    "ManifestDocument",
    "RULE_SETS",
    "Segment",
    "SegmentSelector",
    "TranscriptionManifest",
    "TranscriptionReport",
    "build_plan",
    "detect_references",
    "load_manifest",
    "parse_manifest",
    "segment_document",
    "transcribe",
]
