/**
 * Browser entry point: wires the DOM to the session controller and repaints
 * panes from its state after every action. All data on screen comes from
 * the render functions over raw service payloads.
 */

import { ApiClient } from "./api.js";
import {
  renderBanner,
  renderElementDetail,
  renderLinkRail,
  renderProvenanceTree,
  renderReviewQueue,
  renderSearchResults,
  renderTiStructure,
  renderTrail,
} from "./render.js";
import { ExplorerSession } from "./session.js";

function pane(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing pane #${id}`);
  return node;
}

function baseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "";
}

function start(): void {
  const session = new ExplorerSession(new ApiClient(baseUrl()));
  const panes = {
    banner: pane("banner"),
    trail: pane("trail"),
    results: pane("search-results"),
    detail: pane("detail"),
    provenance: pane("provenance"),
    rail: pane("rail"),
    ti: pane("ti-structure"),
    queue: pane("review-queue"),
  };

  function paint(): void {
    const { state, trail } = session;
    panes.banner.innerHTML = renderBanner(state.banner);
    panes.trail.innerHTML = renderTrail(trail.list(), trail.positionIndex());
    panes.results.innerHTML = renderSearchResults(state.search);
    panes.detail.innerHTML = renderElementDetail(
      state.detail.element,
      state.detail.notFoundId,
    );
    panes.provenance.innerHTML = renderProvenanceTree(state.detail.provenance);
    panes.rail.innerHTML = renderLinkRail(state.detail.rail);
    panes.ti.innerHTML = renderTiStructure(state.ti);
    panes.queue.innerHTML = renderReviewQueue(state.reviewQueue);
    (document.getElementById("nav-back") as HTMLButtonElement).disabled =
      !trail.canBack();
    (document.getElementById("nav-forward") as HTMLButtonElement).disabled =
      !trail.canForward();
  }

  const searchForm = document.getElementById("search-form") as HTMLFormElement;
  searchForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = document.getElementById("search-terms") as HTMLInputElement;
    const terms = input.value.split(/\s+/).filter((term) => term.length > 0);
    if (terms.length === 0) return;
    void session.search(terms).then(paint);
  });

  document.getElementById("nav-back")!.addEventListener("click", () => {
    void session.back().then(paint);
  });
  document.getElementById("nav-forward")!.addEventListener("click", () => {
    void session.forward().then(paint);
  });
  document.getElementById("load-queue")!.addEventListener("click", () => {
    void session.loadReviewQueue().then(paint);
  });

  document.body.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const elementLink = target.closest<HTMLElement>("[data-element-id]");
    if (elementLink !== null) {
      event.preventDefault();
      void session.followLink(elementLink.dataset.elementId!).then(paint);
      return;
    }
    const tiLink = target.closest<HTMLElement>("[data-ti-id]");
    if (tiLink !== null) {
      event.preventDefault();
      void session.openTi(tiLink.dataset.tiId!).then(paint);
      return;
    }
    const review = target.closest<HTMLElement>("[data-review-link]");
    if (review !== null) {
      event.preventDefault();
      const decision = review.dataset.decision === "reject" ? "reject" : "confirm";
      void session.review(review.dataset.reviewLink!, decision).then(paint);
      return;
    }
    if (target.classList.contains("dismiss")) {
      session.dismissBanner();
      paint();
    }
  });

  paint();
}

document.addEventListener("DOMContentLoaded", start);
