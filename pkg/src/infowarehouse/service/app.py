"""HTTP interface over one warehouse store.

All handlers run under a single lock: writes are serialized (single-writer
contract) and reads always see a complete state. Responses are rendered
with the canonical serializer, so a GET repeated against an unchanged
warehouse returns byte-identical bodies, and every payload equals the CLI's
canonical output for the same operation.

Mutations follow the store's write-ahead discipline, so any 4xx/5xx leaves
both the log and the in-memory state untouched.
"""

import os
import threading
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Header, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .. import __version__
from ..canonical import canonical_dumps, now_utc
from ..errors import StorageError, ValidationError, WarehouseError
from ..model import (
    LinkStatus,
    ProvenanceRecord,
    SourceSpan,
    parse_ie_type,
    parse_link_kind,
    parse_link_status,
)
from ..query import Query, QueryFilters
from ..storage import WarehouseStore
from .. import views
from .schemas import (
    CreateElementRequest,
    CreateLinkRequest,
    CreateTiRequest,
    DeprecateRequest,
    ReviewRequest,
    SearchRequest,
)

STATUS_BY_CODE = {
    "not_found": 404,
    "validation": 400,
    "constraint": 409,
    "conflict": 409,
    "storage": 500,
}


def canonical_response(payload: dict, status_code: int = 200) -> Response:
    return Response(
        content=canonical_dumps(payload),
        media_type="application/json",
        status_code=status_code,
    )


def error_payload(code: str, message: str, subject_id=None, rule=None) -> dict:
    return {"code": code, "message": message, "subject_id": subject_id, "rule": rule}


def build_query(body: SearchRequest) -> Query:
    filters = QueryFilters(
        kw_type=body.kw_type,
        ti_id=body.ti_id,
        ie_type=body.ie_type,
        tags=frozenset(body.tags),
        include_deprecated=body.include_deprecated,
    )
    return Query.build(body.terms, filters, body.limit)


def create_app(store: WarehouseStore, *, ui_dir: str | Path | None = None) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        store.close()  # graceful shutdown flushes the log and drops the lock

    app = FastAPI(title="infowarehouse", version=__version__, lifespan=lifespan)
    # no auth in v1; open CORS lets a separately hosted explorer UI connect
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    lock = threading.RLock()
    warehouse = store.warehouse

    @app.exception_handler(WarehouseError)
    async def warehouse_error_handler(request: Request, exc: WarehouseError):
        return canonical_response(
            error_payload(
                exc.code, str(exc), getattr(exc, "subject_id", None), getattr(exc, "rule", None)
            ),
            status_code=STATUS_BY_CODE[exc.code],
        )

    @app.exception_handler(RequestValidationError)
    async def request_error_handler(request: Request, exc: RequestValidationError):
        return canonical_response(
            error_payload("validation", str(exc.errors())), status_code=400
        )

    # -- reads ------------------------------------------------------------

    @app.get("/health")
    def health():
        with lock:
            return canonical_response(
                views.health_view(__version__, store.log.record_count)
            )

    @app.get("/elements/{element_id}")
    def get_element(element_id: str):
        with lock:
            return canonical_response(views.element_view(warehouse, element_id))

    @app.get("/elements/{element_id}/neighbors")
    def get_neighbors(
        element_id: str, depth: int = 1, kind: str = "both", direction: str = "both"
    ):
        with lock:
            return canonical_response(
                views.neighbors_view(warehouse, element_id, depth, kind, direction)
            )

    @app.get("/elements/{element_id}/provenance")
    def get_provenance(element_id: str):
        with lock:
            return canonical_response(views.provenance_view(warehouse, element_id))

    @app.get("/tis")
    def list_tis(limit: int = 50, offset: int = 0):
        with lock:
            return canonical_response(views.tis_list_view(warehouse, limit, offset))

    @app.get("/tis/{ti_id}")
    def get_ti(ti_id: str):
        with lock:
            return canonical_response(views.ti_structure_view(warehouse, ti_id))

    @app.get("/links")
    def list_links(
        status: str | None = None,
        kind: str | None = None,
        limit: int = 50,
        offset: int = 0,
    ):
        with lock:
            return canonical_response(
                views.links_list_view(warehouse, status, kind, limit, offset)
            )

    @app.get("/analysis/centrality")
    def centrality(kind: str = "both"):
        with lock:
            return canonical_response(views.centrality_view(warehouse, kind))

    @app.get("/analysis/components")
    def components(kind: str = "both"):
        with lock:
            return canonical_response(views.components_view(warehouse, kind))

    @app.get("/stats")
    def stats():
        with lock:
            return canonical_response(views.stats_view(warehouse))

    @app.post("/search")
    def search(body: SearchRequest):
        with lock:
            query = build_query(body)
            return canonical_response(
                views.search_view(warehouse, query, body.neighbor_depth)
            )

    # -- writes (live articulation and review) -----------------------------

    @app.post("/tis")
    def create_ti(body: CreateTiRequest):
        with lock:
            ti = store.create_task_instance(body.kw_type, body.title)
            return canonical_response(views.full_ti_payload(warehouse, ti.id), 201)

    @app.post("/tis/{ti_id}/elements")
    def create_element(
        ti_id: str,
        body: CreateElementRequest,
        x_agent: str | None = Header(default=None, alias="X-Agent"),
    ):
        if not x_agent or not x_agent.strip():
            raise ValidationError("X-Agent header is required to record authorship")
        with lock:
            which = body.provenance.which
            provenance = ProvenanceRecord(
                how=body.provenance.how or "api:live",
                where=body.provenance.where,
                what=body.provenance.what,
                when=now_utc(),
                why=body.provenance.why,
                which=SourceSpan(which.doc, which.start, which.end) if which else None,
                whom=x_agent.strip(),
            )
            element = store.add_element(
                ti_id,
                parse_ie_type(body.ie_type),
                body.principal_content,
                provenance,
                frozenset(body.tags),
            )
            return canonical_response(views.element_view(warehouse, element.id), 201)

    @app.post("/links")
    def create_link(body: CreateLinkRequest):
        with lock:
            status = parse_link_status(body.status)
            if status is LinkStatus.REJECTED:
                raise ValidationError("links cannot be created in rejected state")
            link = store.add_link(
                body.src, body.dst, parse_link_kind(body.kind), body.annotation, status
            )
            return canonical_response(views.link_view(warehouse, link.id), 201)

    @app.post("/links/{link_id}/review")
    def review_link(link_id: str, body: ReviewRequest):
        with lock:
            link = store.review_link(link_id, body.decision)
            return canonical_response(views.link_view(warehouse, link.id))

    @app.post("/elements/{element_id}/deprecate")
    def deprecate_element(element_id: str, body: DeprecateRequest):
        with lock:
            element = store.deprecate_element(element_id, body.reason)
            return canonical_response(views.element_view(warehouse, element.id))

    return app


def serve(warehouse_path: str, bind: str = "127.0.0.1:8600") -> None:
    """Open the store, start the HTTP service, flush on shutdown.

    Set IW_UI_DIR to a built explorer bundle to also host it under /ui.
    """
    import uvicorn

    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValidationError(f"bind address must be host:port, got {bind!r}")
    store = WarehouseStore.open(warehouse_path)
    try:
        uvicorn.run(
            create_app(store, ui_dir=os.environ.get("IW_UI_DIR")),
            host=host,
            port=int(port_text),
        )
    except OSError as exc:  # bind failure -> clean startup error, nonzero exit
        raise StorageError(f"cannot bind {bind}: {exc}") from exc
    except SystemExit as exc:  # uvicorn signals startup failure via sys.exit
        if exc.code not in (0, None):
            raise StorageError(f"service failed to start on {bind}") from exc
    finally:
        store.close()
