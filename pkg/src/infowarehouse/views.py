"""Canonical read-side payloads.

The service returns these dicts rendered with ``canonical_dumps``; the CLI's
``--format canonical`` prints exactly the same bytes. Keeping a single
builder per view is what guarantees the two interfaces never drift.
"""

from .query import (
    Query,
    connected_components,
    degree_centrality,
    exploration_view,
    neighborhood,
    path_between,
    provenance_chain,
    ti_view,
)
from .records import element_payload, link_payload, provenance_payload, ti_payload
from .warehouse import Warehouse

PREVIEW_CHARS = 80


def preview(text: str) -> str:
    return text[:PREVIEW_CHARS]


def full_ti_payload(warehouse: Warehouse, ti_id: str) -> dict:
    ti = warehouse.get_task_instance(ti_id)
    payload = ti_payload(ti)
    payload["member_ids"] = list(ti.member_ids)
    return payload


def element_view(warehouse: Warehouse, element_id: str) -> dict:
    return element_payload(warehouse.get_element(element_id))


def neighbors_view(
    warehouse: Warehouse,
    element_id: str,
    depth: int = 1,
    kind_filter: str = "both",
    direction: str = "both",
) -> dict:
    hood = neighborhood(warehouse, element_id, depth, kind_filter, direction)
    elements = []
    for node, distance in sorted(hood.distances.items(), key=lambda kv: (kv[1], kv[0])):
        payload = element_payload(warehouse.elements[node])
        payload["distance"] = distance
        elements.append(payload)
    return {
        "root": hood.root,
        "depth": hood.depth,
        "kind": hood.kind_filter,
        "direction": hood.direction,
        "elements": elements,
        "links": [link_payload(link) for link in hood.links],
    }


def provenance_view(warehouse: Warehouse, element_id: str) -> dict:
    def node_payload(node) -> dict:
        return {
            "element_id": node.element_id,
            "depth": node.depth,
            "provenance": provenance_payload(node.provenance),
            "created_to_serve_it": [node_payload(c) for c in node.created_to_serve_it],
            "references": [node_payload(c) for c in node.references],
        }

    return {"root": node_payload(provenance_chain(warehouse, element_id))}


def ti_structure_view(warehouse: Warehouse, ti_id: str) -> dict:
    view = ti_view(warehouse, ti_id)
    return {
        "ti": full_ti_payload(warehouse, ti_id),
        "topological_order": list(view.topological_order),
        "creational_links": [link_payload(link) for link in view.creational_links],
        "boundary_references": [link_payload(link) for link in view.boundary_references],
    }


def tis_list_view(warehouse: Warehouse, limit: int = 50, offset: int = 0) -> dict:
    ordered = sorted(
        warehouse.tis.values(), key=lambda ti: (ti.created_at, ti.id)
    )
    page = ordered[offset : offset + limit]
    return {
        "total": len(ordered),
        "limit": limit,
        "offset": offset,
        "tis": [full_ti_payload(warehouse, ti.id) for ti in page],
    }


def links_list_view(
    warehouse: Warehouse,
    status: str | None = None,
    kind: str | None = None,
    limit: int = 50,
    offset: int = 0,
) -> dict:
    links = [
        warehouse.links[link_id]
        for link_id in sorted(warehouse.links)
        if (status is None or warehouse.links[link_id].status.value == status)
        and (kind is None or warehouse.links[link_id].kind.value == kind)
    ]
    page = links[offset : offset + limit]
    return {
        "total": len(links),
        "limit": limit,
        "offset": offset,
        "links": [link_payload(link) for link in page],
    }


def query_echo(query: Query) -> dict:
    return {
        "terms": list(query.terms),
        "filters": {
            "kw_type": query.filters.kw_type,
            "ti_id": query.filters.ti_id,
            "ie_type": query.filters.ie_type,
            "tags": sorted(query.filters.tags),
            "include_deprecated": query.filters.include_deprecated,
        },
        "limit": query.limit,
    }


def search_view(warehouse: Warehouse, query: Query, neighbor_depth: int = 1) -> dict:
    view = exploration_view(warehouse, query, neighbor_depth)
    entries = []
    for entry in view.entries:
        groups = {}
        for group, members in entry.neighbors.items():
            groups[group] = [
                {
                    "id": node,
                    "distance": distance,
                    "preview": preview(warehouse.elements[node].principal_content),
                }
                for node, distance in members
            ]
        entries.append(
            {
                "element": element_payload(entry.element),
                "score": entry.score,
                "neighbors": groups,
                "provenance": provenance_payload(entry.provenance),
            }
        )
    return {
        "query": query_echo(view.query),
        "neighbor_depth": view.neighbor_depth,
        "total_matched": view.total_matched,
        "entries": entries,
    }


def path_view(warehouse: Warehouse, src: str, dst: str, kind_filter: str = "both") -> dict:
    result = path_between(warehouse, src, dst, kind_filter)
    if result is None:
        return {"src": src, "dst": dst, "kind": kind_filter, "found": False,
                "path": None, "hops": None, "kinds": None}
    return {
        "src": src,
        "dst": dst,
        "kind": kind_filter,
        "found": True,
        "path": list(result.ids),
        "hops": result.hops,
        "kinds": [k.value for k in result.kinds],
    }


def centrality_view(warehouse: Warehouse, kind_filter: str = "both") -> dict:
    degrees = degree_centrality(warehouse, kind_filter)
    return {
        "kind": kind_filter,
        "degrees": {
            element_id: {"in": in_deg, "out": out_deg}
            for element_id, (in_deg, out_deg) in degrees.items()
        },
    }


def components_view(warehouse: Warehouse, kind_filter: str = "both") -> dict:
    components = connected_components(warehouse, kind_filter)
    as_lists = sorted(sorted(component) for component in components)
    return {"kind": kind_filter, "components": as_lists}


def stats_view(warehouse: Warehouse) -> dict:
    return warehouse.counts()


def validate_view(warehouse: Warehouse) -> dict:
    return {
        "violations": [
            {"code": v.code, "subject_id": v.subject_id, "message": v.message}
            for v in warehouse.validate()
        ]
    }


def link_view(warehouse: Warehouse, link_id: str) -> dict:
    return link_payload(warehouse.get_link(link_id))


def health_view(version: str, record_count: int) -> dict:
    return {"status": "ok", "version": version, "records": record_count}
