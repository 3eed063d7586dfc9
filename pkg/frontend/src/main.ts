// Playground wiring: script picker, chat input, and the three live panes.
// One request in flight at a time; after each post the session is re-fetched
// so the panes always show server state.

import { ApiError, createSession, getSession, listScripts, postUtterance } from "./api.js";
import type { Panes } from "./render.js";
import { renderAll } from "./render.js";
import { applySnapshot, initialState, withBanner, type ViewState } from "./state.js";

let state: ViewState = initialState();

function panes(): Panes {
  const get = (id: string) => {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  return {
    banner: get("banner"),
    chat: get("chat"),
    slots: get("slots") as HTMLTableElement,
    residual: get("residual"),
    trace: get("trace"),
    input: get("utterance") as HTMLInputElement,
    send: get("send") as HTMLButtonElement,
    status: get("status"),
  };
}

function update(next: ViewState): void {
  state = next;
  renderAll(panes(), state);
}

async function startDialog(script: string): Promise<void> {
  update({ ...initialState(script), busy: true });
  try {
    const snap = await createSession(script);
    update(applySnapshot(state, snap));
    panes().input.focus();
  } catch (err) {
    update(withBanner(state, describe(err)));
  }
}

async function sendUtterance(text: string): Promise<void> {
  if (!state.sessionId || state.busy) return;
  update({ ...state, busy: true });
  try {
    await postUtterance(state.sessionId, text);
    const snap = await getSession(state.sessionId);
    update(applySnapshot(state, snap));
  } catch (err) {
    update(withBanner(state, describe(err)));
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? err.message : `${err.status}: ${err.message}`;
  }
  return String(err);
}

async function boot(): Promise<void> {
  const picker = document.getElementById("script-choice") as HTMLSelectElement;
  const form = document.getElementById("say") as HTMLFormElement;
  const input = document.getElementById("utterance") as HTMLInputElement;
  const restart = document.getElementById("restart") as HTMLButtonElement;

  let scripts: string[] = [];
  try {
    scripts = await listScripts();
  } catch (err) {
    update(withBanner(state, describe(err)));
    return;
  }
  picker.replaceChildren(
    ...scripts.map((id) => {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = id;
      return option;
    }),
  );

  picker.addEventListener("change", () => void startDialog(picker.value));
  restart.addEventListener("click", () => void startDialog(picker.value));
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    void sendUtterance(text);
  });

  if (scripts.length > 0) {
    await startDialog(scripts[0]);
  } else {
    update(withBanner(state, "no scripts loaded on the server"));
  }
}

document.addEventListener("DOMContentLoaded", () => void boot());
