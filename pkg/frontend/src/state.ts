// Client view state, always derived from the latest server snapshot.

import type { SessionSnapshot, TurnView } from "./api.js";

export interface SlotRow {
  name: string;
  value: string | null;
  filledAt: number | null;
}

export interface ViewState {
  sessionId: string | null;
  scriptChoice: string;
  phase: "idle" | "active" | "completed" | "aborted";
  chat: TurnView[];
  slots: SlotRow[];
  residual: string;
  previousResidual: string | null;
  trace: string;
  banner: string | null;
  busy: boolean;
}

export function initialState(scriptChoice = ""): ViewState {
  return {
    sessionId: null,
    scriptChoice,
    phase: "idle",
    chat: [],
    slots: [],
    residual: "",
    previousResidual: null,
    trace: "",
    banner: null,
    busy: false,
  };
}

/** Fold a snapshot into the view; the previous residual is kept for the diff. */
export function applySnapshot(state: ViewState, snap: SessionSnapshot): ViewState {
  const fresh = state.sessionId !== snap.sessionId;
  return {
    ...state,
    sessionId: snap.sessionId,
    scriptChoice: snap.script,
    phase: snap.phase,
    chat: snap.turnLog,
    slots: slotRows(snap),
    previousResidual: fresh ? null : state.residual,
    residual: snap.residualScript,
    trace: snap.traceNotation,
    banner: null,
    busy: false,
  };
}

export function slotRows(snap: SessionSnapshot): SlotRow[] {
  return Object.entries(snap.slots).map(([name, value]) => ({
    name,
    value,
    filledAt: name in snap.filledAt ? snap.filledAt[name] : null,
  }));
}

export function inputDisabled(state: ViewState): boolean {
  return state.busy || state.phase !== "active";
}

export function withBanner(state: ViewState, message: string): ViewState {
  return { ...state, banner: message, busy: false };
}
