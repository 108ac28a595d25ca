"""Operator command line.

Every query command is a thin client over the same view builders the HTTP
service uses, so ``--format canonical`` prints byte-for-byte the payload the
corresponding endpoint would return. Human output is table-oriented with
80-character content previews; ``show`` prints full content.

Exit codes: 0 success, 1 usage/validation, 2 not found, 3 constraint or
conflict, 4 storage/corruption.
"""

import argparse
import os
import sys
from pathlib import Path

from . import __version__, views
from .canonical import canonical_dumps
from .errors import (
    ConstraintError,
    DuplicateError,
    NotFoundError,
    StateError,
    StorageError,
    ValidationError,
    WarehouseError,
)
from .query import Query, QueryFilters
from .storage import WarehouseStore, load
from .transcription import load_manifest, transcribe

ENV_WAREHOUSE = "IW_WAREHOUSE"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_FOUND = 2
EXIT_CONSTRAINT = 3
EXIT_STORAGE = 4


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def exit_code_for(exc: WarehouseError) -> int:
    if isinstance(exc, NotFoundError):
        return EXIT_NOT_FOUND
    if isinstance(exc, (ConstraintError, DuplicateError, StateError)):
        return EXIT_CONSTRAINT
    if isinstance(exc, StorageError):
        return EXIT_STORAGE
    return EXIT_USAGE  # validation and malformed input


def build_parser() -> CliParser:
    parser = CliParser(prog="iw", description=__doc__)
    parser.add_argument("--warehouse", "-w", help=f"log path (or ${ENV_WAREHOUSE})")
    parser.add_argument(
        "--format",
        choices=("human", "canonical"),
        default="human",
        help="human tables or canonical records",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    sub.add_parser("init", help="create an empty warehouse log")

    p = sub.add_parser("ingest", help="transcribe a manifest's documents")
    p.add_argument("manifest")

    p = sub.add_parser("search", help="relevance search with linkage and provenance")
    p.add_argument("terms", nargs="+")
    p.add_argument("--limit", type=int, default=50)
    p.add_argument("--ti")
    p.add_argument("--ie-type")
    p.add_argument("--kw-type")
    p.add_argument("--tag", action="append", default=[])
    p.add_argument("--include-deprecated", action="store_true")
    p.add_argument("--neighbor-depth", type=int, default=1)

    p = sub.add_parser("show", help="print one element in full")
    p.add_argument("id")

    p = sub.add_parser("neighbors", help="breadth-first closure around an element")
    p.add_argument("id")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--kind", default="both", choices=("creational", "reference", "both"))
    p.add_argument("--direction", default="both", choices=("out", "in", "both"))

    p = sub.add_parser("path", help="shortest link path between two elements")
    p.add_argument("src")
    p.add_argument("dst")
    p.add_argument("--kind", default="both", choices=("creational", "reference", "both"))

    p = sub.add_parser("ti", help="task instance structure")
    p.add_argument("id")

    p = sub.add_parser("provenance", help="transitive origin tree of an element")
    p.add_argument("id")

    p = sub.add_parser("review", help="confirm or reject a pending link")
    p.add_argument("link_id")
    p.add_argument("decision", choices=("confirm", "reject"))

    p = sub.add_parser("centrality", help="in/out degree per element")
    p.add_argument("--kind", default="both", choices=("creational", "reference", "both"))

    p = sub.add_parser("components", help="connected components")
    p.add_argument("--kind", default="both", choices=("creational", "reference", "both"))

    sub.add_parser("validate", help="integrity scan")
    sub.add_parser("stats", help="entity counts")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--bind", default="127.0.0.1:8600")

    return parser


def resolve_warehouse(args) -> Path:
    path = args.warehouse or os.environ.get(ENV_WAREHOUSE)
    if not path:
        raise UsageError(f"no warehouse path: pass --warehouse or set ${ENV_WAREHOUSE}")
    return Path(path)


# -- human renderers ---------------------------------------------------------


def _table(rows: list[tuple], header: tuple) -> str:
    widths = [len(str(h)) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(str(cell)))
    lines = ["  ".join(str(h).ljust(widths[i]) for i, h in enumerate(header))]
    for row in rows:
        lines.append("  ".join(str(cell).ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


def _human_search(payload: dict) -> str:
    if not payload["entries"]:
        return "no matches"
    rows = [
        (
            rank + 1,
            f"{entry['score']:.6f}",
            entry["element"]["id"],
            entry["element"]["ie_type"],
            views.preview(entry["element"]["principal_content"]).replace("\n", " "),
        )
        for rank, entry in enumerate(payload["entries"])
    ]
    table = _table(rows, ("rank", "score", "id", "type", "content"))
    return f"{table}\n{payload['total_matched']} matched"


def _human_element(payload: dict) -> str:
    lines = [
        f"id:         {payload['id']}",
        f"ti:         {payload['ti_id']}",
        f"type:       {payload['ie_type']}",
        f"tags:       {', '.join(payload['tags']) or '-'}",
        f"created:    {payload['created_at']}",
        f"deprecated: {payload['deprecated']}",
        "provenance:",
    ]
    for facet in ("how", "where", "what", "when", "why", "whom"):
        lines.append(f"  {facet:<6} {payload['provenance'][facet]}")
    which = payload["provenance"]["which"]
    lines.append(
        "  which  "
        + (f"{which['doc']} [{which['start']}:{which['end']}]" if which else "-")
    )
    lines.append("content:")
    lines.append(payload["principal_content"])
    return "\n".join(lines)


def _human_neighbors(payload: dict) -> str:
    rows = [
        (
            e["distance"],
            e["id"],
            e["ie_type"],
            views.preview(e["principal_content"]).replace("\n", " "),
        )
        for e in payload["elements"]
    ]
    out = _table(rows, ("dist", "id", "type", "content"))
    if payload["links"]:
        link_rows = [
            (l["kind"], l["src"], "->", l["dst"], l["status"]) for l in payload["links"]
        ]
        out += "\n\nlinks:\n" + _table(link_rows, ("kind", "src", "", "dst", "status"))
    return out


def _human_path(payload: dict) -> str:
    if not payload["found"]:
        return "no path"
    steps = [payload["path"][0]]
    for kind, node in zip(payload["kinds"], payload["path"][1:]):
        steps.append(f"-[{kind}]-> {node}")
    return f"{payload['hops']} hops\n" + "\n".join(steps)


def _human_ti(payload: dict) -> str:
    ti = payload["ti"]
    lines = [
        f"id:      {ti['id']}",
        f"kw_type: {ti['kw_type']}",
        f"title:   {ti['title']}",
        f"created: {ti['created_at']}",
        f"members: {len(ti['member_ids'])}",
        "order (creators before the elements they serve):",
    ]
    lines.extend(f"  {element_id}" for element_id in payload["topological_order"])
    if payload["creational_links"]:
        lines.append("creational links:")
        lines.extend(
            f"  {l['src']} -> {l['dst']}" for l in payload["creational_links"]
        )
    if payload["boundary_references"]:
        lines.append("boundary references:")
        lines.extend(
            f"  {l['src']} -> {l['dst']}" for l in payload["boundary_references"]
        )
    return "\n".join(lines)


def _human_provenance(payload: dict) -> str:
    lines: list[str] = []

    def walk(node: dict) -> None:
        pad = "  " * node["depth"]
        p = node["provenance"]
        lines.append(f"{pad}{node['element_id']}")
        lines.append(f"{pad}  how={p['how']} whom={p['whom']} when={p['when']}")
        for child in node["created_to_serve_it"]:
            lines.append(f"{pad}  created to serve it:")
            walk(child)
        for child in node["references"]:
            lines.append(f"{pad}  references:")
            walk(child)

    walk(payload["root"])
    return "\n".join(lines)


def _human_centrality(payload: dict) -> str:
    rows = [
        (element_id, d["in"], d["out"])
        for element_id, d in sorted(payload["degrees"].items())
    ]
    return _table(rows, ("id", "in", "out")) if rows else "no elements"


def _human_components(payload: dict) -> str:
    if not payload["components"]:
        return "no elements"
    return "\n".join(
        f"[{i}] {' '.join(component)}"
        for i, component in enumerate(payload["components"])
    )


def _human_stats(payload: dict) -> str:
    lines = [
        f"documents: {payload['documents']}",
        f"tis:       {payload['tis']}",
        f"elements:  {payload['elements']['total']} ({payload['elements']['deprecated']} deprecated)",
        "links:",
    ]
    for kind, by_status in payload["links"].items():
        counts = ", ".join(f"{status}={n}" for status, n in by_status.items())
        lines.append(f"  {kind}: {counts}")
    return "\n".join(lines)


def _human_validate(payload: dict) -> str:
    violations = payload["violations"]
    if not violations:
        return "consistent"
    rows = [(v["code"], v["subject_id"], v["message"]) for v in violations]
    return _table(rows, ("code", "subject", "message"))


def _human_link(payload: dict) -> str:
    return (
        f"{payload['id']}: {payload['src']} -[{payload['kind']}]-> {payload['dst']} "
        f"({payload['status']})"
    )


# -- command handlers ---------------------------------------------------------


def emit(args, payload: dict, human: str) -> None:
    print(canonical_dumps(payload) if args.format == "canonical" else human)


def run_command(args) -> int:
    command = args.command
    if command is None:
        raise UsageError("a command is required (see --help)")

    if command == "init":
        path = resolve_warehouse(args)
        store = WarehouseStore.create(path)
        store.close()
        print(f"initialized {path}")
        return EXIT_OK

    if command == "serve":
        from .service import serve

        serve(str(resolve_warehouse(args)), args.bind)
        return EXIT_OK

    if command == "ingest":
        manifest = load_manifest(args.manifest)
        with WarehouseStore.open(resolve_warehouse(args)) as store:
            report = transcribe(manifest, store)
        payload = {
            "ti_id": report.ti_id,
            "element_ids": report.element_ids,
            "confirmed_link_ids": report.confirmed_link_ids,
            "pending_link_ids": report.pending_link_ids,
            "skipped_candidates": [list(item) for item in report.skipped_candidates],
        }
        human = "\n".join(
            [
                f"ti: {report.ti_id}",
                f"elements: {len(report.element_ids)}",
                f"confirmed links: {len(report.confirmed_link_ids)}",
                f"pending candidates: {len(report.pending_link_ids)}",
            ]
            + [f"  pending {link_id}" for link_id in report.pending_link_ids]
            + [
                f"  skipped {evidence!r}: {reason}"
                for evidence, reason in report.skipped_candidates
            ]
        )
        emit(args, payload, human)
        return EXIT_OK

    if command == "review":
        with WarehouseStore.open(resolve_warehouse(args)) as store:
            link = store.review_link(args.link_id, args.decision)
            payload = views.link_view(store.warehouse, link.id)
        emit(args, payload, _human_link(payload))
        return EXIT_OK

    # read-only commands operate on a plain load (no lock needed)
    warehouse = load(resolve_warehouse(args))

    if command == "search":
        filters = QueryFilters(
            kw_type=args.kw_type,
            ti_id=args.ti,
            ie_type=args.ie_type,
            tags=frozenset(args.tag),
            include_deprecated=args.include_deprecated,
        )
        query = Query.build(args.terms, filters, args.limit)
        payload = views.search_view(warehouse, query, args.neighbor_depth)
        emit(args, payload, _human_search(payload))
    elif command == "show":
        payload = views.element_view(warehouse, args.id)
        emit(args, payload, _human_element(payload))
    elif command == "neighbors":
        payload = views.neighbors_view(warehouse, args.id, args.depth, args.kind, args.direction)
        emit(args, payload, _human_neighbors(payload))
    elif command == "path":
        payload = views.path_view(warehouse, args.src, args.dst, args.kind)
        emit(args, payload, _human_path(payload))
    elif command == "ti":
        payload = views.ti_structure_view(warehouse, args.id)
        emit(args, payload, _human_ti(payload))
    elif command == "provenance":
        payload = views.provenance_view(warehouse, args.id)
        emit(args, payload, _human_provenance(payload))
    elif command == "centrality":
        payload = views.centrality_view(warehouse, args.kind)
        emit(args, payload, _human_centrality(payload))
    elif command == "components":
        payload = views.components_view(warehouse, args.kind)
        emit(args, payload, _human_components(payload))
    elif command == "stats":
        payload = views.stats_view(warehouse)
        emit(args, payload, _human_stats(payload))
    elif command == "validate":
        payload = views.validate_view(warehouse)
        emit(args, payload, _human_validate(payload))
    else:
        raise UsageError(f"unknown command {command!r}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return run_command(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WarehouseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
