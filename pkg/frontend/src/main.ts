/**
 * Browser bootstrap: one logical poll loop, at most one in-flight request,
 * filter buttons that only touch client state.
 *
 * The poll interval comes from the server's status payload; a ?poll=<ms>
 * query parameter overrides it.
 */

import { render } from "./render.js";
import { initialState, pollOnce, setFilter, type ClientState, type ModalityFilter } from "./state.js";

const fetchJson = async (path: string): Promise<unknown> => {
  const response = await fetch(path, { cache: "no-store" });
  if (!response.ok) {
    throw new Error(`HTTP ${response.status}`);
  }
  return response.json();
};

function apply(state: ClientState): void {
  const view = render(state);
  (document.getElementById("banner") as HTMLElement).innerHTML = view.banner;
  (document.getElementById("status") as HTMLElement).innerHTML = view.status;
  (document.getElementById("log") as HTMLElement).innerHTML = view.log;
  for (const button of document.querySelectorAll<HTMLButtonElement>("[data-filter]")) {
    button.classList.toggle("active", button.dataset.filter === state.filter);
  }
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const override = Number(params.get("poll"));
  let state = initialState(override > 0 ? override : 2000);
  let polling = false;

  for (const button of document.querySelectorAll<HTMLButtonElement>("[data-filter]")) {
    button.addEventListener("click", () => {
      state = setFilter(state, button.dataset.filter as ModalityFilter);
      apply(state);
    });
  }

  const tick = async (): Promise<void> => {
    if (!polling) {
      polling = true;
      try {
        state = await pollOnce(state, fetchJson);
        apply(state);
      } finally {
        polling = false;
      }
    }
    const interval = override > 0 ? override : state.pollIntervalMs;
    window.setTimeout(tick, interval);
  };

  apply(state);
  void tick();
}

document.addEventListener("DOMContentLoaded", main);
