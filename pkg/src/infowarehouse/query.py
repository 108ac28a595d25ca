"""Read-side operations: relevance ranking, link navigation, provenance
chains, and basic network analyses.

Everything here is pure over a warehouse snapshot. Only confirmed links
ever contribute; pending-review and rejected links are invisible. All
orderings are deterministic so repeated calls on an unchanged warehouse
produce byte-identical serialized results.
"""

import math
import unicodedata
from dataclasses import dataclass, field
from heapq import heappop, heappush

from .canonical import epoch_micros
from .errors import NotFoundError, ValidationError
from .model import (
    InformationElement,
    Link,
    LinkKind,
    LinkStatus,
    ProvenanceRecord,
    TaskInstance,
)
from .warehouse import Warehouse

KIND_FILTERS = ("creational", "reference", "both")
DIRECTIONS = ("out", "in", "both")


def normalize_token(token: str) -> str:
    token = token.casefold()
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    tokens = []
    for raw in text.split():
        token = normalize_token(raw)
        if token:
            tokens.append(token)
    return tokens


@dataclass(frozen=True)
class QueryFilters:
    kw_type: str | None = None
    ti_id: str | None = None
    ie_type: str | None = None
    tags: frozenset[str] = frozenset()
    include_deprecated: bool = False


@dataclass(frozen=True)
class Query:
    terms: tuple[str, ...]
    filters: QueryFilters = QueryFilters()
    limit: int = 50

    @classmethod
    def build(
        cls, terms, filters: QueryFilters | None = None, limit: int = 50
    ) -> "Query":
        normalized = tuple(t for t in (normalize_token(str(raw)) for raw in terms) if t)
        if not normalized:
            raise ValidationError("query needs at least one searchable term")
        if limit < 1:
            raise ValidationError("query limit must be >= 1")
        return cls(terms=normalized, filters=filters or QueryFilters(), limit=limit)


def _universe(warehouse: Warehouse, include_deprecated: bool) -> list[InformationElement]:
    return [
        e
        for e in warehouse.elements.values()
        if include_deprecated or not e.deprecated
    ]


def _passes_filters(warehouse: Warehouse, element: InformationElement, f: QueryFilters) -> bool:
    if f.ti_id is not None and element.ti_id != f.ti_id:
        return False
    if f.ie_type is not None and element.ie_type.value != f.ie_type:
        return False
    if f.tags and not f.tags <= element.tags:
        return False
    if f.kw_type is not None:
        ti = warehouse.tis.get(element.ti_id)
        if ti is None or ti.kw_type != f.kw_type:
            return False
    return True


def scored_matches(
    warehouse: Warehouse, query: Query, *, idf_scale: float = 1.0
) -> list[tuple[str, float]]:
    """All matches (score > 0) in rank order, before the limit is applied.

    score(q, e) = sum over query terms of tf(t, e) * idf(t), with
    tf = count(t in tokens(e)) / len(tokens(e)) and
    idf = ln((N + 1) / (df(t) + 1)) + 1 over the search universe.
    Ties break toward newer elements, then lexicographic id.
    """
    if not query.terms:
        raise ValidationError("query needs at least one searchable term")
    universe = _universe(warehouse, query.filters.include_deprecated)
    n_docs = len(universe)
    tokens_by_id = {e.id: tokenize(e.principal_content) for e in universe}

    df: dict[str, int] = {}
    for term in set(query.terms):
        df[term] = sum(1 for e in universe if term in tokens_by_id[e.id])

    idf = {
        term: (math.log((n_docs + 1) / (df[term] + 1)) + 1.0) * idf_scale
        for term in df
    }

    results = []
    for element in universe:
        if not _passes_filters(warehouse, element, query.filters):
            continue
        tokens = tokens_by_id[element.id]
        if not tokens:
            continue
        count: dict[str, int] = {}
        for token in tokens:
            count[token] = count.get(token, 0) + 1
        score = 0.0
        for term in query.terms:
            tf = count.get(term, 0) / len(tokens)
            score += tf * idf[term]
        if score > 0.0:
            results.append((element.id, score, epoch_micros(element.created_at)))
    results.sort(key=lambda item: (-item[1], -item[2], item[0]))
    return [(element_id, score) for element_id, score, _ in results]


def relevance_search(warehouse: Warehouse, query: Query) -> list[tuple[str, float]]:
    return scored_matches(warehouse, query)[: query.limit]


# -- link navigation ---------------------------------------------------------


def _check_kind(kind_filter: str) -> None:
    if kind_filter not in KIND_FILTERS:
        raise ValidationError(f"kind filter must be one of {KIND_FILTERS}")


def _check_direction(direction: str) -> None:
    if direction not in DIRECTIONS:
        raise ValidationError(f"direction must be one of {DIRECTIONS}")


def _kinds(kind_filter: str) -> tuple[LinkKind, ...]:
    if kind_filter == "both":
        return (LinkKind.CREATIONAL, LinkKind.REFERENCE)
    return (LinkKind(kind_filter),)


def _confirmed(warehouse: Warehouse, link_id: str) -> Link | None:
    link = warehouse.links[link_id]
    return link if link.status is LinkStatus.CONFIRMED else None


def _step_neighbors(
    warehouse: Warehouse, node: str, kinds, direction: str
) -> set[str]:
    found: set[str] = set()
    for kind in kinds:
        if direction in ("out", "both"):
            for link_id in warehouse.links_out(node, kind):
                link = _confirmed(warehouse, link_id)
                if link is not None:
                    found.add(link.dst)
        if direction in ("in", "both"):
            for link_id in warehouse.links_in(node, kind):
                link = _confirmed(warehouse, link_id)
                if link is not None:
                    found.add(link.src)
    return found


@dataclass
class Neighborhood:
    root: str
    depth: int
    kind_filter: str
    direction: str
    distances: dict[str, int]
    links: list[Link]


def neighborhood(
    warehouse: Warehouse,
    element_id: str,
    depth: int,
    kind_filter: str = "both",
    direction: str = "both",
    *,
    include_deprecated: bool = True,
) -> Neighborhood:
    """Breadth-first closure around an element over confirmed links."""
    warehouse.get_element(element_id)
    _check_kind(kind_filter)
    _check_direction(direction)
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    kinds = _kinds(kind_filter)
    distances = {element_id: 0}
    frontier = [element_id]
    for level in range(1, depth + 1):
        next_frontier = []
        for node in frontier:
            for neighbor in _step_neighbors(warehouse, node, kinds, direction):
                if neighbor in distances:
                    continue
                if not include_deprecated and warehouse.elements[neighbor].deprecated:
                    continue
                distances[neighbor] = level
                next_frontier.append(neighbor)
        frontier = next_frontier
    members = set(distances)
    links = [
        link
        for link_id in sorted(warehouse.links)
        if (link := warehouse.links[link_id]).status is LinkStatus.CONFIRMED
        and link.kind in kinds
        and link.src in members
        and link.dst in members
    ]
    return Neighborhood(
        root=element_id,
        depth=depth,
        kind_filter=kind_filter,
        direction=direction,
        distances=distances,
        links=links,
    )


@dataclass(frozen=True)
class PathResult:
    ids: tuple[str, ...]
    hops: int
    kinds: tuple[LinkKind, ...]


def _undirected_adjacency(warehouse: Warehouse, kinds) -> dict[str, set[str]]:
    adjacency: dict[str, set[str]] = {e: set() for e in warehouse.elements}
    for link in warehouse.links.values():
        if link.status is LinkStatus.CONFIRMED and link.kind in kinds:
            adjacency[link.src].add(link.dst)
            adjacency[link.dst].add(link.src)
    return adjacency


def path_between(
    warehouse: Warehouse, src: str, dst: str, kind_filter: str = "both"
) -> PathResult | None:
    """Shortest undirected path over confirmed links; among equal-length
    paths the lexicographically smallest id sequence wins."""
    warehouse.get_element(src)
    warehouse.get_element(dst)
    _check_kind(kind_filter)
    kinds = _kinds(kind_filter)
    if src == dst:
        return PathResult(ids=(src,), hops=0, kinds=())
    adjacency = _undirected_adjacency(warehouse, kinds)

    # distances to dst, then a greedy lexicographic descent from src
    dist = {dst: 0}
    frontier = [dst]
    while frontier:
        next_frontier = []
        for node in frontier:
            for neighbor in adjacency[node]:
                if neighbor not in dist:
                    dist[neighbor] = dist[node] + 1
                    next_frontier.append(neighbor)
        frontier = next_frontier
    if src not in dist:
        return None
    path = [src]
    current = src
    while current != dst:
        current = min(
            n for n in adjacency[current] if dist.get(n) == dist[current] - 1
        )
        path.append(current)

    kinds_traversed = []
    for a, b in zip(path, path[1:]):
        joining = [
            link
            for link in warehouse.links.values()
            if link.status is LinkStatus.CONFIRMED
            and link.kind in kinds
            and {link.src, link.dst} == {a, b}
        ]
        kinds_traversed.append(min(joining, key=lambda l: l.id).kind)
    return PathResult(ids=tuple(path), hops=len(path) - 1, kinds=tuple(kinds_traversed))


# -- task instance view -------------------------------------------------------


@dataclass
class TiView:
    ti: TaskInstance
    topological_order: list[str]
    creational_links: list[Link]
    boundary_references: list[Link]


def ti_view(warehouse: Warehouse, ti_id: str) -> TiView:
    """Creational structure of one task instance plus its boundary references.

    Order places every element before the elements it was created to serve
    (link src -> dst reads "src was created to satisfy dst"); ties break by
    (created_at, id).
    """
    ti = warehouse.get_task_instance(ti_id)
    members = set(ti.member_ids)
    creational = [
        warehouse.links[link_id]
        for link_id in sorted(warehouse.links)
        if (link := warehouse.links[link_id]).kind is LinkKind.CREATIONAL
        and link.status is LinkStatus.CONFIRMED
        and link.src in members
        and link.dst in members
    ]
    successors: dict[str, list[str]] = {m: [] for m in members}
    indegree = {m: 0 for m in members}
    for link in creational:
        successors[link.src].append(link.dst)
        indegree[link.dst] += 1

    def sort_key(member_id: str) -> tuple[int, str]:
        return (epoch_micros(warehouse.elements[member_id].created_at), member_id)

    heap: list[tuple[tuple[int, str], str]] = []
    for member_id in members:
        if indegree[member_id] == 0:
            heappush(heap, (sort_key(member_id), member_id))
    order: list[str] = []
    while heap:
        _, member_id = heappop(heap)
        order.append(member_id)
        for nxt in successors[member_id]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heappush(heap, (sort_key(nxt), nxt))

    boundary = [
        warehouse.links[link_id]
        for link_id in sorted(warehouse.links)
        if (link := warehouse.links[link_id]).kind is LinkKind.REFERENCE
        and link.status is LinkStatus.CONFIRMED
        and (link.src in members) != (link.dst in members)
    ]
    return TiView(
        ti=ti,
        topological_order=order,
        creational_links=creational,
        boundary_references=boundary,
    )


# -- provenance chains --------------------------------------------------------


@dataclass
class ProvenanceNode:
    element_id: str
    depth: int
    provenance: ProvenanceRecord
    created_to_serve_it: list["ProvenanceNode"] = field(default_factory=list)
    references: list["ProvenanceNode"] = field(default_factory=list)


def provenance_chain(warehouse: Warehouse, element_id: str) -> ProvenanceNode:
    """Transitive origin tree: what was created to serve this element
    (creational in-neighbors) and what it draws on (reference out-neighbors).
    A visited guard keeps reference cycles finite; each element appears once.
    """
    warehouse.get_element(element_id)
    visited: set[str] = set()

    def build(node_id: str, depth: int) -> ProvenanceNode:
        visited.add(node_id)
        element = warehouse.elements[node_id]
        node = ProvenanceNode(
            element_id=node_id, depth=depth, provenance=element.provenance
        )
        creators = sorted(
            link.src
            for link_id in warehouse.links_in(node_id, LinkKind.CREATIONAL)
            if (link := _confirmed(warehouse, link_id)) is not None
        )
        used = sorted(
            link.dst
            for link_id in warehouse.links_out(node_id, LinkKind.REFERENCE)
            if (link := _confirmed(warehouse, link_id)) is not None
        )
        for child in creators:
            if child not in visited:
                node.created_to_serve_it.append(build(child, depth + 1))
        for child in used:
            if child not in visited:
                node.references.append(build(child, depth + 1))
        return node

    return build(element_id, 0)


# -- network analyses ---------------------------------------------------------


def degree_centrality(
    warehouse: Warehouse, kind_filter: str = "both"
) -> dict[str, tuple[int, int]]:
    """(in-degree, out-degree) per element over confirmed matching links."""
    _check_kind(kind_filter)
    kinds = _kinds(kind_filter)
    degrees = {element_id: [0, 0] for element_id in warehouse.elements}
    for link in warehouse.links.values():
        if link.status is LinkStatus.CONFIRMED and link.kind in kinds:
            degrees[link.dst][0] += 1
            degrees[link.src][1] += 1
    return {element_id: (d[0], d[1]) for element_id, d in degrees.items()}


def connected_components(
    warehouse: Warehouse, kind_filter: str = "both"
) -> list[set[str]]:
    """Undirected components over confirmed matching links, isolated
    elements included; ordered by smallest member id."""
    _check_kind(kind_filter)
    adjacency = _undirected_adjacency(warehouse, _kinds(kind_filter))
    seen: set[str] = set()
    components: list[set[str]] = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        component = {start}
        frontier = [start]
        seen.add(start)
        while frontier:
            node = frontier.pop()
            for neighbor in adjacency[node]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    component.add(neighbor)
                    frontier.append(neighbor)
        components.append(component)
    return components


# -- the composed view --------------------------------------------------------


@dataclass
class ViewEntry:
    element: InformationElement
    score: float
    # group key "<kind>_<direction>" -> [(neighbor id, distance)]
    neighbors: dict[str, list[tuple[str, int]]]
    provenance: ProvenanceRecord


@dataclass
class ExplorationView:
    query: Query
    neighbor_depth: int
    total_matched: int
    entries: list[ViewEntry]


NEIGHBOR_GROUPS = (
    ("creational", "in"),
    ("creational", "out"),
    ("reference", "in"),
    ("reference", "out"),
)


def exploration_view(
    warehouse: Warehouse, query: Query, neighbor_depth: int = 1
) -> ExplorationView:
    """Relevance hits, each bundled with its immediate linkage and its
    provenance record: the one response that answers "what is relevant,
    what is it connected to, and where did it come from"."""
    if neighbor_depth < 0:
        raise ValidationError("neighbor depth must be >= 0")
    matches = scored_matches(warehouse, query)
    include_deprecated = query.filters.include_deprecated
    entries = []
    for element_id, score in matches[: query.limit]:
        groups: dict[str, list[tuple[str, int]]] = {}
        for kind, direction in NEIGHBOR_GROUPS:
            hood = neighborhood(
                warehouse,
                element_id,
                neighbor_depth,
                kind,
                direction,
                include_deprecated=include_deprecated,
            )
            groups[f"{kind}_{direction}"] = sorted(
                (node, dist) for node, dist in hood.distances.items() if dist > 0
            )
        element = warehouse.elements[element_id]
        entries.append(
            ViewEntry(
                element=element,
                score=score,
                neighbors=groups,
                provenance=element.provenance,
            )
        )
    return ExplorationView(
        query=query,
        neighbor_depth=neighbor_depth,
        total_matched=len(matches),
        entries=entries,
    )
