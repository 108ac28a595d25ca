/**
 * Payload shapes exactly as the warehouse service returns them. The client
 * never reshapes or re-ranks this data; it only renders it.
 */

export interface SpanPayload {
  doc: string;
  start: number;
  end: number;
}

export interface ProvenancePayload {
  how: string;
  where: string;
  what: string;
  when: string;
  why: string;
  which: SpanPayload | null;
  whom: string;
}

export interface ElementPayload {
  id: string;
  ti_id: string;
  ie_type: string;
  principal_content: string;
  provenance: ProvenancePayload;
  tags: string[];
  created_at: string;
  deprecated: boolean;
}

export interface NeighborElementPayload extends ElementPayload {
  distance: number;
}

export interface LinkPayload {
  id: string;
  src: string;
  dst: string;
  kind: string;
  annotation: string | null;
  status: string;
}

export interface NeighborsPayload {
  root: string;
  depth: number;
  kind: string;
  direction: string;
  elements: NeighborElementPayload[];
  links: LinkPayload[];
}

export interface SearchNeighborPayload {
  id: string;
  distance: number;
  preview: string;
}

export interface SearchEntryPayload {
  element: ElementPayload;
  score: number;
  neighbors: Record<string, SearchNeighborPayload[]>;
  provenance: ProvenancePayload;
}

export interface SearchPayload {
  query: {
    terms: string[];
    filters: Record<string, unknown>;
    limit: number;
  };
  neighbor_depth: number;
  total_matched: number;
  entries: SearchEntryPayload[];
}

export interface ProvenanceNodePayload {
  element_id: string;
  depth: number;
  provenance: ProvenancePayload;
  created_to_serve_it: ProvenanceNodePayload[];
  references: ProvenanceNodePayload[];
}

export interface ProvenanceTreePayload {
  root: ProvenanceNodePayload;
}

export interface TiPayload {
  id: string;
  kw_type: string;
  title: string;
  created_at: string;
  member_ids: string[];
}

export interface TiStructurePayload {
  ti: TiPayload;
  topological_order: string[];
  creational_links: LinkPayload[];
  boundary_references: LinkPayload[];
}

export interface LinksListPayload {
  total: number;
  limit: number;
  offset: number;
  links: LinkPayload[];
}

export interface ApiErrorPayload {
  code: string;
  message: string;
  subject_id: string | null;
  rule: string | null;
}
