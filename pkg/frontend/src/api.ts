/**
 * Thin typed client over the warehouse service. Only documented endpoints,
 * no transformation of responses. The fetch implementation is injectable so
 * tests can drive the client against recorded payloads.
 */

import type {
  ApiErrorPayload,
  ElementPayload,
  LinkPayload,
  LinksListPayload,
  NeighborsPayload,
  ProvenanceTreePayload,
  SearchPayload,
  TiStructurePayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly payload: ApiErrorPayload,
  ) {
    super(payload.message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const data = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, data as ApiErrorPayload);
    }
    return data as T;
  }

  search(terms: string[]): Promise<SearchPayload> {
    return this.request("POST", "/search", { terms });
  }

  element(id: string): Promise<ElementPayload> {
    return this.request("GET", `/elements/${id}`);
  }

  provenance(id: string): Promise<ProvenanceTreePayload> {
    return this.request("GET", `/elements/${id}/provenance`);
  }

  neighbors(id: string): Promise<NeighborsPayload> {
    return this.request("GET", `/elements/${id}/neighbors?depth=1&kind=both&direction=both`);
  }

  pendingLinks(): Promise<LinksListPayload> {
    return this.request("GET", "/links?status=pending-review&limit=50&offset=0");
  }

  ti(id: string): Promise<TiStructurePayload> {
    return this.request("GET", `/tis/${id}`);
  }

  review(linkId: string, decision: "confirm" | "reject"): Promise<LinkPayload> {
    return this.request("POST", `/links/${linkId}/review`, { decision });
  }
}
