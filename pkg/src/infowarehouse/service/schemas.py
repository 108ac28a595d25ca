"""Pydantic request bodies for the HTTP service.

These validate shape only; domain rules (non-empty content, link
constraints, facet rules) are enforced by the warehouse so that the service
and the CLI reject exactly the same inputs.
"""

from pydantic import BaseModel, Field


class SearchRequest(BaseModel):
    terms: list[str]
    kw_type: str | None = None
    ti_id: str | None = None
    ie_type: str | None = None
    tags: list[str] = Field(default_factory=list)
    include_deprecated: bool = False
    limit: int = 50
    neighbor_depth: int = 1


class CreateTiRequest(BaseModel):
    kw_type: str
    title: str


class SpanBody(BaseModel):
    doc: str
    start: int
    end: int


class ProvenanceBody(BaseModel):
    how: str = "unknown"
    where: str = "unknown"
    what: str = "unknown"
    why: str = "unknown"
    which: SpanBody | None = None


class CreateElementRequest(BaseModel):
    ie_type: str = "note"
    principal_content: str
    tags: list[str] = Field(default_factory=list)
    provenance: ProvenanceBody = Field(default_factory=ProvenanceBody)


class CreateLinkRequest(BaseModel):
    src: str
    dst: str
    kind: str
    annotation: str | None = None
    status: str = "confirmed"


class ReviewRequest(BaseModel):
    decision: str


class DeprecateRequest(BaseModel):
    reason: str
