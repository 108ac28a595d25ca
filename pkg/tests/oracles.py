"""Brute-force reference implementations used to check the real ones.

Everything here is deliberately naive (edge-list scans, full rescans, no
indexes) and written against the data model only — nothing is imported from
the query or storage engines whose answers these oracles judge.
"""

import math
import unicodedata


def _confirmed_edges(warehouse, kind_filter):
    return [
        (link.src, link.dst)
        for link in warehouse.links.values()
        if link.status.value == "confirmed"
        and (kind_filter == "both" or link.kind.value == kind_filter)
    ]


def oracle_neighborhood(warehouse, root, depth, kind_filter="both", direction="both"):
    """id -> distance map via level-by-level expansion over the edge list."""
    edges = _confirmed_edges(warehouse, kind_filter)
    dist = {root: 0}
    frontier = [root]
    for level in range(1, depth + 1):
        nxt = []
        for node in frontier:
            reachable = set()
            if direction in ("out", "both"):
                reachable |= {d for s, d in edges if s == node}
            if direction in ("in", "both"):
                reachable |= {s for s, d in edges if d == node}
            for other in reachable:
                if other not in dist:
                    dist[other] = level
                    nxt.append(other)
        frontier = nxt
    return dist


def oracle_path_hops(warehouse, src, dst, kind_filter="both"):
    """Shortest undirected hop count, or None when disconnected."""
    if src == dst:
        return 0
    edges = _confirmed_edges(warehouse, kind_filter)
    seen = {src}
    frontier = [src]
    hops = 0
    while frontier:
        hops += 1
        nxt = []
        for node in frontier:
            for s, d in edges:
                for other in ((d,) if s == node else ()) + ((s,) if d == node else ()):
                    if other == dst:
                        return hops
                    if other not in seen:
                        seen.add(other)
                        nxt.append(other)
        frontier = nxt
    return None


def oracle_degrees(warehouse, kind_filter="both"):
    degrees = {element_id: (0, 0) for element_id in warehouse.elements}
    for src, dst in _confirmed_edges(warehouse, kind_filter):
        i, o = degrees[src]
        degrees[src] = (i, o + 1)
        i, o = degrees[dst]
        degrees[dst] = (i + 1, o)
    return degrees


def oracle_components(warehouse, kind_filter="both"):
    """Frozenset of frozensets, via union-find."""
    parent = {element_id: element_id for element_id in warehouse.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for src, dst in _confirmed_edges(warehouse, kind_filter):
        parent[find(src)] = find(dst)
    groups = {}
    for element_id in warehouse.elements:
        groups.setdefault(find(element_id), set()).add(element_id)
    return frozenset(frozenset(group) for group in groups.values())


# -- retrieval ----------------------------------------------------------------


def oracle_tokens(text):
    out = []
    for raw in text.split():
        token = raw.casefold()
        while token and unicodedata.category(token[0])[0] == "P":
            token = token[1:]
        while token and unicodedata.category(token[-1])[0] == "P":
            token = token[:-1]
        if token:
            out.append(token)
    return out


def oracle_scores(warehouse, terms, include_deprecated=False):
    """id -> tf-idf score for every element with score > 0."""
    universe = [
        e for e in warehouse.elements.values() if include_deprecated or not e.deprecated
    ]
    n = len(universe)
    toks = {e.id: oracle_tokens(e.principal_content) for e in universe}
    scores = {}
    for e in universe:
        tokens = toks[e.id]
        if not tokens:
            continue
        total = 0.0
        for term in terms:
            df = sum(1 for other in universe if term in toks[other.id])
            tf = tokens.count(term) / len(tokens)
            idf = math.log((n + 1) / (df + 1)) + 1.0
            total += tf * idf
        if total > 0.0:
            scores[e.id] = total
    return scores


def oracle_ranking(warehouse, terms, include_deprecated=False):
    """(id, score) list ranked by score desc, created_at desc, id asc."""
    scores = oracle_scores(warehouse, terms, include_deprecated)
    # three stable passes give exact datetime comparison for the tie-break
    ranked = sorted(scores.items(), key=lambda kv: kv[0])
    ranked.sort(key=lambda kv: warehouse.elements[kv[0]].created_at, reverse=True)
    ranked.sort(key=lambda kv: kv[1], reverse=True)
    return ranked


# -- integrity ----------------------------------------------------------------


def oracle_violation_codes(warehouse):
    """Set of (code, subject_id) pairs found by a naive integrity rescan."""
    found = set()
    for e in warehouse.elements.values():
        ti = warehouse.tis.get(e.ti_id)
        if ti is None:
            found.add(("unknown-ti", e.id))
        elif e.id not in ti.member_ids:
            found.add(("membership-missing", e.id))
        if not e.principal_content:
            found.add(("empty-content", e.id))
    for ti in warehouse.tis.values():
        for member in ti.member_ids:
            element = warehouse.elements.get(member)
            if element is None:
                found.add(("membership-dangling", ti.id))
            elif element.ti_id != ti.id:
                found.add(("membership-mismatch", ti.id))
    for link in warehouse.links.values():
        if link.src not in warehouse.elements or link.dst not in warehouse.elements:
            found.add(("dangling-endpoint", link.id))
        if link.src == link.dst:
            found.add(("self-link", link.id))
        if (
            link.kind.value == "creational"
            and link.src in warehouse.elements
            and link.dst in warehouse.elements
            and warehouse.elements[link.src].ti_id != warehouse.elements[link.dst].ti_id
        ):
            found.add(("creational-cross-ti", link.id))
    for ti in warehouse.tis.values():
        members = [m for m in ti.member_ids if m in warehouse.elements]
        edges = [
            (l.src, l.dst)
            for l in warehouse.links.values()
            if l.kind.value == "creational"
            and l.status.value != "rejected"
            and l.src in members
            and l.dst in members
        ]
        # DFS cycle detection
        color = {m: 0 for m in members}

        def cyclic(node):
            color[node] = 1
            for s, d in edges:
                if s == node:
                    if color[d] == 1 or (color[d] == 0 and cyclic(d)):
                        return True
            color[node] = 2
            return False

        if any(color[m] == 0 and cyclic(m) for m in members):
            found.add(("creational-cycle", ti.id))
    return found
