// DOM rendering, no framework: each pane re-renders from ViewState.

import { diffLines } from "./diff.js";
import type { ViewState } from "./state.js";
import { inputDisabled } from "./state.js";

export interface Panes {
  banner: HTMLElement;
  chat: HTMLElement;
  slots: HTMLElement;
  residual: HTMLElement;
  trace: HTMLElement;
  input: HTMLInputElement;
  send: HTMLButtonElement;
  status: HTMLElement;
}

export function renderAll(panes: Panes, state: ViewState): void {
  renderBanner(panes.banner, state);
  renderChat(panes.chat, state);
  renderSlots(panes.slots, state);
  renderResidual(panes.residual, state);
  panes.trace.textContent = state.trace;
  panes.input.disabled = inputDisabled(state);
  panes.send.disabled = inputDisabled(state);
  panes.status.textContent = state.phase === "idle" ? "" : state.phase;
  panes.status.className = `status status-${state.phase}`;
}

function renderBanner(el: HTMLElement, state: ViewState): void {
  el.textContent = state.banner ?? "";
  el.hidden = state.banner === null;
}

function renderChat(el: HTMLElement, state: ViewState): void {
  el.replaceChildren();
  for (const turn of state.chat) {
    const row = document.createElement("div");
    row.className = `turn turn-${turn.speaker === "S" ? "system" : "caller"} turn-${turn.kind}`;
    const who = document.createElement("span");
    who.className = "who";
    who.textContent = turn.speaker === "S" ? "S" : "C";
    const text = document.createElement("span");
    text.className = "text";
    text.textContent = turn.text;
    row.append(who, text);
    if (turn.classification) {
      const tag = document.createElement("span");
      tag.className = `tag tag-${turn.classification}`;
      tag.textContent = turn.classification;
      row.append(tag);
    }
    el.append(row);
  }
  el.scrollTop = el.scrollHeight;
}

function renderSlots(el: HTMLElement, state: ViewState): void {
  el.replaceChildren();
  const header = document.createElement("tr");
  for (const title of ["slot", "value", "filled at turn"]) {
    const th = document.createElement("th");
    th.textContent = title;
    header.append(th);
  }
  el.append(header);
  for (const row of state.slots) {
    const tr = document.createElement("tr");
    tr.className = row.value === null ? "slot-open" : "slot-filled";
    const cells = [row.name, row.value ?? "—", row.filledAt === null ? "" : String(row.filledAt)];
    for (const value of cells) {
      const td = document.createElement("td");
      td.textContent = value;
      tr.append(td);
    }
    el.append(tr);
  }
}

function renderResidual(el: HTMLElement, state: ViewState): void {
  el.replaceChildren();
  const lines =
    state.previousResidual === null
      ? state.residual.split("\n").map((text) => ({ kind: "same" as const, text }))
      : diffLines(state.previousResidual, state.residual);
  for (const line of lines) {
    const div = document.createElement("div");
    div.className = `line line-${line.kind}`;
    div.textContent = line.text || " ";
    el.append(div);
  }
}
