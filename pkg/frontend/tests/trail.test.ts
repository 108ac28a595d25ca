import { describe, expect, it } from "vitest";

import { ExplorationTrail } from "../src/trail.js";

describe("ExplorationTrail", () => {
  it("tracks visits in order with a current position", () => {
    const trail = new ExplorationTrail();
    expect(trail.current()).toBeNull();
    trail.visit("a", 1);
    trail.visit("b", 2);
    trail.visit("c", 3);
    expect(trail.current()).toBe("c");
    expect(trail.list().map((entry) => entry.elementId)).toEqual(["a", "b", "c"]);
    expect(trail.list().map((entry) => entry.visitedAt)).toEqual([1, 2, 3]);
  });

  it("walks back and forward without losing entries", () => {
    const trail = new ExplorationTrail();
    trail.visit("a");
    trail.visit("b");
    trail.visit("c");
    expect(trail.back()).toBe("b");
    expect(trail.back()).toBe("a");
    expect(trail.back()).toBeNull();
    expect(trail.forward()).toBe("b");
    expect(trail.forward()).toBe("c");
    expect(trail.forward()).toBeNull();
    expect(trail.list()).toHaveLength(3);
  });

  it("truncates forward history on a fresh visit", () => {
    const trail = new ExplorationTrail();
    trail.visit("a");
    trail.visit("b");
    trail.visit("c");
    trail.back();
    trail.back();
    trail.visit("d");
    expect(trail.list().map((entry) => entry.elementId)).toEqual(["a", "d"]);
    expect(trail.canForward()).toBe(false);
  });

  it("caps at 200 entries, evicting the oldest", () => {
    const trail = new ExplorationTrail();
    for (let index = 0; index < 205; index += 1) {
      trail.visit(`element-${index}`);
    }
    expect(trail.list()).toHaveLength(200);
    expect(trail.list()[0].elementId).toBe("element-5");
    expect(trail.current()).toBe("element-204");
  });
});
