/**
 * DOM-free controller of one exploration session.
 *
 * Holds the pane states (always raw service payloads), the trail, and a
 * small element cache — nothing else. Per-pane sequence counters drop stale
 * responses so concurrent requests land in request order. Unknown-id errors
 * show inline in the detail pane; every other service error becomes a
 * dismissable banner.
 */

import { ApiClient, ApiError } from "./api.js";
import { ExplorationTrail } from "./trail.js";
import type {
  ElementPayload,
  LinksListPayload,
  NeighborsPayload,
  ProvenanceNodePayload,
  SearchPayload,
  TiStructurePayload,
} from "./types.js";

export interface DetailState {
  element: ElementPayload | null;
  provenance: ProvenanceNodePayload | null;
  rail: NeighborsPayload | null;
  notFoundId: string | null;
}

export interface SessionState {
  search: SearchPayload | null;
  detail: DetailState;
  ti: TiStructurePayload | null;
  reviewQueue: LinksListPayload | null;
  banner: string | null;
}

type Pane = "search" | "detail" | "ti" | "queue";

export class ExplorerSession {
  readonly trail = new ExplorationTrail();
  readonly state: SessionState = {
    search: null,
    detail: { element: null, provenance: null, rail: null, notFoundId: null },
    ti: null,
    reviewQueue: null,
    banner: null,
  };
  private readonly elementCache = new Map<string, ElementPayload>();
  private readonly sequence: Record<Pane, number> = {
    search: 0,
    detail: 0,
    ti: 0,
    queue: 0,
  };

  constructor(private readonly api: ApiClient) {}

  private begin(pane: Pane): number {
    this.sequence[pane] += 1;
    return this.sequence[pane];
  }

  private stale(pane: Pane, token: number): boolean {
    return this.sequence[pane] !== token;
  }

  private report(error: unknown): void {
    this.state.banner =
      error instanceof ApiError
        ? `${error.payload.code}: ${error.payload.message}`
        : String(error);
  }

  dismissBanner(): void {
    this.state.banner = null;
  }

  cachedElement(id: string): ElementPayload | undefined {
    return this.elementCache.get(id);
  }

  async search(terms: string[]): Promise<void> {
    const token = this.begin("search");
    try {
      const payload = await this.api.search(terms);
      if (this.stale("search", token)) return;
      this.state.search = payload;
      for (const entry of payload.entries) {
        this.elementCache.set(entry.element.id, entry.element);
      }
    } catch (error) {
      if (!this.stale("search", token)) this.report(error);
    }
  }

  /** Open an element in the detail pane, recording it on the trail. */
  async open(elementId: string, options: { viaTrail?: boolean } = {}): Promise<void> {
    const token = this.begin("detail");
    try {
      const [element, provenance, rail] = await Promise.all([
        this.api.element(elementId),
        this.api.provenance(elementId),
        this.api.neighbors(elementId),
      ]);
      if (this.stale("detail", token)) return;
      this.state.detail = {
        element,
        provenance: provenance.root,
        rail,
        notFoundId: null,
      };
      this.elementCache.set(element.id, element);
      if (!options.viaTrail) {
        this.trail.visit(elementId);
      }
    } catch (error) {
      if (this.stale("detail", token)) return;
      if (error instanceof ApiError && error.payload.code === "not_found") {
        this.state.detail = {
          element: null,
          provenance: null,
          rail: null,
          notFoundId: elementId,
        };
      } else {
        this.report(error);
      }
    }
  }

  followLink(elementId: string): Promise<void> {
    return this.open(elementId);
  }

  async back(): Promise<void> {
    const elementId = this.trail.back();
    if (elementId !== null) {
      await this.open(elementId, { viaTrail: true });
    }
  }

  async forward(): Promise<void> {
    const elementId = this.trail.forward();
    if (elementId !== null) {
      await this.open(elementId, { viaTrail: true });
    }
  }

  async openTi(tiId: string): Promise<void> {
    const token = this.begin("ti");
    try {
      const payload = await this.api.ti(tiId);
      if (this.stale("ti", token)) return;
      this.state.ti = payload;
    } catch (error) {
      if (!this.stale("ti", token)) this.report(error);
    }
  }

  async loadReviewQueue(): Promise<void> {
    const token = this.begin("queue");
    try {
      const payload = await this.api.pendingLinks();
      if (this.stale("queue", token)) return;
      this.state.reviewQueue = payload;
    } catch (error) {
      if (!this.stale("queue", token)) this.report(error);
    }
  }

  /**
   * Decide one pending candidate, then refresh the queue and, if an element
   * is open, its link rail — in place, no page reload, all payloads straight
   * from the service.
   */
  async review(linkId: string, decision: "confirm" | "reject"): Promise<void> {
    try {
      await this.api.review(linkId, decision);
    } catch (error) {
      this.report(error);
      return;
    }
    const refreshes: Promise<void>[] = [this.loadReviewQueue()];
    const current = this.state.detail.element;
    if (current !== null) {
      const token = this.begin("detail");
      refreshes.push(
        this.api.neighbors(current.id).then((rail) => {
          if (!this.stale("detail", token)) {
            this.state.detail.rail = rail;
          }
        }),
      );
    }
    await Promise.all(refreshes);
  }
}
