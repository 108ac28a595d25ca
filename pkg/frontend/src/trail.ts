/**
 * The exploration trail: where the session has been and where it can go
 * back/forward to. Pure client state; navigating it never touches the
 * warehouse. Capped, oldest entries evicted.
 */

export interface TrailEntry {
  elementId: string;
  visitedAt: number;
}

export const TRAIL_CAPACITY = 200;

export class ExplorationTrail {
  private entries: TrailEntry[] = [];
  private position = -1;

  constructor(private readonly capacity: number = TRAIL_CAPACITY) {}

  /** Record a navigation; drops any forward history, evicts past capacity. */
  visit(elementId: string, visitedAt: number = Date.now()): void {
    this.entries = this.entries.slice(0, this.position + 1);
    this.entries.push({ elementId, visitedAt });
    if (this.entries.length > this.capacity) {
      this.entries.shift();
    }
    this.position = this.entries.length - 1;
  }

  current(): string | null {
    return this.position >= 0 ? this.entries[this.position].elementId : null;
  }

  canBack(): boolean {
    return this.position > 0;
  }

  canForward(): boolean {
    return this.position >= 0 && this.position < this.entries.length - 1;
  }

  back(): string | null {
    if (!this.canBack()) return null;
    this.position -= 1;
    return this.entries[this.position].elementId;
  }

  forward(): string | null {
    if (!this.canForward()) return null;
    this.position += 1;
    return this.entries[this.position].elementId;
  }

  list(): readonly TrailEntry[] {
    return this.entries;
  }

  positionIndex(): number {
    return this.position;
  }
}
