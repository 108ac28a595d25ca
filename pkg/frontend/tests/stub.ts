/**
 * Fetch stub backed by payloads recorded from the real service
 * (frontend/scripts/export_session_fixture.py). It behaves like the service
 * around the scripted session's one mutation: after the recorded review is
 * POSTed, the "after" payloads take over and a second review of the same
 * link returns the conflict the service would return.
 */

import type { FetchLike } from "../src/api.js";
import fixture from "./fixtures/session.json";

type PayloadMap = Record<string, unknown>;

export interface SessionFixture {
  ids: {
    ti: string;
    topHit: string;
    followTarget: string;
    pendingToConfirm: string;
    confirmSrc: string;
  };
  before: PayloadMap;
  review: { path: string; response: unknown };
  after: PayloadMap;
}

export const sessionFixture = fixture as unknown as SessionFixture;

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface StubState {
  reviewed: boolean;
  requests: string[];
}

export function makeStubFetch(): { fetchFn: FetchLike; state: StubState } {
  const state: StubState = { reviewed: false, requests: [] };

  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const key = `${method} ${url}`;
    state.requests.push(key);

    if (method === "POST" && url === sessionFixture.review.path) {
      if (state.reviewed) {
        return jsonResponse(
          {
            code: "conflict",
            message: `link ${sessionFixture.ids.pendingToConfirm} is already confirmed`,
            subject_id: sessionFixture.ids.pendingToConfirm,
            rule: null,
          },
          409,
        );
      }
      state.reviewed = true;
      return jsonResponse(sessionFixture.review.response);
    }

    const source = state.reviewed
      ? { ...sessionFixture.before, ...sessionFixture.after }
      : sessionFixture.before;
    if (key in source) {
      return jsonResponse(source[key]);
    }
    return jsonResponse(
      { code: "not_found", message: `no payload for ${key}`, subject_id: null, rule: null },
      404,
    );
  };

  return { fetchFn, state };
}
