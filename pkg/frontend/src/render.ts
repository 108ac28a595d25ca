/**
 * Pure renderers: service payloads in, HTML strings out. Entries are
 * rendered in payload order — scores, orders, and groupings on screen are
 * exactly what the service said, never recomputed here.
 */

import type {
  ElementPayload,
  LinkPayload,
  LinksListPayload,
  NeighborsPayload,
  ProvenanceNodePayload,
  SearchPayload,
  TiStructurePayload,
} from "./types.js";
import type { TrailEntry } from "./trail.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function formatScore(score: number): string {
  return score.toFixed(6);
}

function shortId(id: string): string {
  return id.slice(0, 8);
}

function elementLink(id: string, label?: string): string {
  return `<a href="#" class="element-link" data-element-id="${escapeHtml(id)}">${escapeHtml(
    label ?? shortId(id),
  )}</a>`;
}

// -- search panel ----------------------------------------------------------

export function renderSearchResults(payload: SearchPayload | null): string {
  if (payload === null) {
    return `<p class="muted">Search the warehouse to begin exploring.</p>`;
  }
  if (payload.entries.length === 0) {
    return `<p class="muted">No matches.</p>`;
  }
  const rows = payload.entries
    .map((entry, index) => {
      const element = entry.element;
      return `<tr>
        <td class="rank">${index + 1}</td>
        <td class="score">${formatScore(entry.score)}</td>
        <td>${elementLink(element.id)}</td>
        <td class="ie-type">${escapeHtml(element.ie_type)}</td>
        <td class="preview">${escapeHtml(element.principal_content.slice(0, 80))}</td>
      </tr>`;
    })
    .join("");
  return `<table class="results">
    <thead><tr><th>#</th><th>score</th><th>element</th><th>type</th><th>content</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
  <p class="muted">${payload.total_matched} matched</p>`;
}

// -- detail pane -------------------------------------------------------------

const FACET_ORDER = ["how", "where", "what", "when", "why", "which", "whom"] as const;

function facetValue(element: ElementPayload, facet: string): string {
  const record = element.provenance;
  if (facet === "which") {
    const span = record.which;
    return span === null ? "-" : `${span.doc} [${span.start}:${span.end}]`;
  }
  return (record as unknown as Record<string, string>)[facet];
}

export function renderElementDetail(
  element: ElementPayload | null,
  notFoundId: string | null,
): string {
  if (notFoundId !== null) {
    return `<p class="not-found">Element <code>${escapeHtml(notFoundId)}</code> was not found; it may be stale.</p>`;
  }
  if (element === null) {
    return `<p class="muted">Open a search hit or follow a link.</p>`;
  }
  const facets = FACET_ORDER.map(
    (facet) =>
      `<tr><th>${facet}</th><td>${escapeHtml(facetValue(element, facet))}</td></tr>`,
  ).join("");
  const tags = element.tags.length
    ? element.tags.map((tag) => `<span class="tag">${escapeHtml(tag)}</span>`).join(" ")
    : `<span class="muted">none</span>`;
  const flag = element.deprecated ? `<span class="deprecated">deprecated</span>` : "";
  return `<header>
      <h3>${escapeHtml(element.ie_type)} <code>${escapeHtml(element.id)}</code> ${flag}</h3>
      <p>task instance ${elementLinkToTi(element.ti_id)} · created ${escapeHtml(element.created_at)} · tags: ${tags}</p>
    </header>
    <pre class="content">${escapeHtml(element.principal_content)}</pre>
    <h4>Provenance</h4>
    <table class="facets"><tbody>${facets}</tbody></table>`;
}

function elementLinkToTi(tiId: string): string {
  return `<a href="#" class="ti-link" data-ti-id="${escapeHtml(tiId)}">${escapeHtml(
    shortId(tiId),
  )}</a>`;
}

// -- provenance chain ----------------------------------------------------------

export function renderProvenanceTree(root: ProvenanceNodePayload | null): string {
  if (root === null) {
    return `<p class="muted">Provenance appears with an opened element.</p>`;
  }

  function node(payload: ProvenanceNodePayload): string {
    const p = payload.provenance;
    const children = [
      ...payload.created_to_serve_it.map(
        (child) => `<li class="creational">created to serve it: ${node(child)}</li>`,
      ),
      ...payload.references.map(
        (child) => `<li class="reference">references: ${node(child)}</li>`,
      ),
    ].join("");
    return `<div class="prov-node" data-depth="${payload.depth}">
      ${elementLink(payload.element_id)}
      <span class="prov-summary">how=${escapeHtml(p.how)} · whom=${escapeHtml(p.whom)} · when=${escapeHtml(p.when)}</span>
      ${children ? `<ul>${children}</ul>` : ""}
    </div>`;
  }

  return node(root);
}

// -- link rail -----------------------------------------------------------------

export interface RailGroup {
  key: string;
  title: string;
  members: { elementId: string; linkId: string; preview: string }[];
}

export const RAIL_GROUPS: { key: string; title: string }[] = [
  { key: "creational_in", title: "created to serve it" },
  { key: "creational_out", title: "it was created to serve" },
  { key: "reference_in", title: "referenced by" },
  { key: "reference_out", title: "references" },
];

/** Group the rail strictly from the service's neighbors payload. */
export function groupRailLinks(payload: NeighborsPayload): RailGroup[] {
  const previews = new Map(
    payload.elements.map((element) => [element.id, element.principal_content.slice(0, 80)]),
  );
  return RAIL_GROUPS.map(({ key, title }) => {
    const [kind, direction] = key.split("_");
    const members = payload.links
      .filter(
        (link) =>
          link.kind === kind &&
          (direction === "out" ? link.src === payload.root : link.dst === payload.root),
      )
      .map((link) => {
        const elementId = direction === "out" ? link.dst : link.src;
        return { elementId, linkId: link.id, preview: previews.get(elementId) ?? "" };
      });
    return { key, title, members };
  });
}

export function renderLinkRail(payload: NeighborsPayload | null): string {
  if (payload === null) {
    return `<p class="muted">Links appear with an opened element.</p>`;
  }
  const groups = groupRailLinks(payload);
  if (groups.every((group) => group.members.length === 0)) {
    return `<p class="muted">No confirmed links yet.</p>`;
  }
  return groups
    .filter((group) => group.members.length > 0)
    .map(
      (group) => `<section class="rail-group" data-group="${group.key}">
        <h4>${escapeHtml(group.title)}</h4>
        <ul>${group.members
          .map(
            (member) =>
              `<li data-link-id="${escapeHtml(member.linkId)}">${elementLink(
                member.elementId,
              )} <span class="preview">${escapeHtml(member.preview)}</span></li>`,
          )
          .join("")}</ul>
      </section>`,
    )
    .join("");
}

// -- review queue -----------------------------------------------------------------

export function renderReviewQueue(payload: LinksListPayload | null): string {
  if (payload === null) {
    return `<p class="muted">Load the queue to review pending candidates.</p>`;
  }
  if (payload.links.length === 0) {
    return `<p class="muted">Nothing pending review.</p>`;
  }
  const rows = payload.links
    .map(
      (link) => `<li class="pending" data-link-id="${escapeHtml(link.id)}">
        ${elementLink(link.src)} →[${escapeHtml(link.kind)}]→ ${elementLink(link.dst)}
        <em class="evidence">${escapeHtml(link.annotation ?? "")}</em>
        <button class="review" data-review-link="${escapeHtml(link.id)}" data-decision="confirm">confirm</button>
        <button class="review" data-review-link="${escapeHtml(link.id)}" data-decision="reject">reject</button>
      </li>`,
    )
    .join("");
  return `<p class="muted">${payload.total} pending</p><ul class="queue">${rows}</ul>`;
}

// -- task instance structure ---------------------------------------------------------

/**
 * Deterministic layered layout keyed by topological rank: an element's layer
 * is the longest creational chain feeding it, so creators sit above the
 * elements they serve. No physics, no randomness.
 */
export function computeTiLayers(payload: TiStructurePayload): string[][] {
  const layer = new Map<string, number>();
  for (const elementId of payload.topological_order) {
    let depth = 0;
    for (const link of payload.creational_links) {
      if (link.dst === elementId && layer.has(link.src)) {
        depth = Math.max(depth, (layer.get(link.src) ?? 0) + 1);
      }
    }
    layer.set(elementId, depth);
  }
  const layers: string[][] = [];
  for (const elementId of payload.topological_order) {
    const depth = layer.get(elementId) ?? 0;
    while (layers.length <= depth) layers.push([]);
    layers[depth].push(elementId);
  }
  return layers;
}

export function renderTiStructure(payload: TiStructurePayload | null): string {
  if (payload === null) {
    return `<p class="muted">Open a task instance to see its structure.</p>`;
  }
  const layers = computeTiLayers(payload)
    .map(
      (ids, depth) => `<div class="layer" data-layer="${depth}">
        ${ids.map((id) => `<span class="node">${elementLink(id)}</span>`).join("")}
      </div>`,
    )
    .join("");
  const edges = payload.creational_links
    .map((link) => `<li>${shortId(link.src)} → ${shortId(link.dst)}</li>`)
    .join("");
  const boundary = payload.boundary_references.length
    ? payload.boundary_references
        .map(
          (link) =>
            `<li>${elementLink(link.src)} →[reference]→ ${elementLink(link.dst)}</li>`,
        )
        .join("")
    : `<li class="muted">none</li>`;
  return `<header>
      <h3>${escapeHtml(payload.ti.title)} <code>${escapeHtml(payload.ti.id)}</code></h3>
      <p>${escapeHtml(payload.ti.kw_type)} · ${payload.ti.member_ids.length} elements</p>
    </header>
    <div class="dag">${layers}</div>
    <h4>Creational links</h4><ul class="edges">${edges || "<li class='muted'>none</li>"}</ul>
    <h4>Boundary references</h4><ul class="boundary">${boundary}</ul>`;
}

// -- chrome ------------------------------------------------------------------------

export function renderBanner(message: string | null): string {
  if (message === null) return "";
  return `<div class="banner" role="alert">${escapeHtml(message)} <button class="dismiss">×</button></div>`;
}

export function renderTrail(entries: readonly TrailEntry[], position: number): string {
  if (entries.length === 0) {
    return `<span class="muted">trail empty</span>`;
  }
  return entries
    .map((entry, index) => {
      const classes = index === position ? "trail-entry current" : "trail-entry";
      return `<span class="${classes}">${elementLink(entry.elementId)}</span>`;
    })
    .join(" › ");
}
