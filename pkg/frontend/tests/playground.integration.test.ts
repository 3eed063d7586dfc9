// End-to-end check against a running server:
//
//     mixdialog serve --port 8737 --scripts-dir ../bundles &
//     PLAYGROUND_URL=http://127.0.0.1:8737 vitest run
//
// Drives the out-of-turn dialog through the same client calls the page makes
// and checks the three panes' data: nested trace, residual diff dropping the
// topping guard, input disabled after completion.

import { describe, expect, it } from "vitest";

import { createSession, getSession, postUtterance } from "../src/api.js";
import { removedLines } from "../src/diff.js";
import { applySnapshot, initialState, inputDisabled } from "../src/state.js";

const BASE = process.env.PLAYGROUND_URL;

describe.skipIf(!BASE)("playground against a live server", () => {
  const origin = (path: string) => new URL(path, BASE).toString();
  const realFetch = globalThis.fetch;
  const patchedFetch: typeof fetch = (input, init) =>
    realFetch(typeof input === "string" ? origin(input) : input, init);

  it("mirrors the out-of-turn dialog into the panes", async () => {
    const realFetch = globalThis.fetch;
    globalThis.fetch = patchedFetch;
    try {
      let state = initialState("pizza");
      state = applySnapshot(state, await createSession("pizza"));
      expect(state.chat.map((t) => t.text)).toContain("What size pizza would you like?");
      expect(inputDisabled(state)).toBe(false);

      const lines = [
        "I'd like a sausage pizza, please.",
        "Medium.",
        "Deep-dish.",
        "Yes.",
      ];
      const removedAfterFirst: string[][] = [];
      for (const line of lines) {
        await postUtterance(state.sessionId!, line);
        const snap = await getSession(state.sessionId!);
        const previous = state.residual;
        state = applySnapshot(state, snap);
        removedAfterFirst.push(removedLines(previous, state.residual));
      }

      // line 1 was out of turn: the topping guard vanished from the residual
      expect(removedAfterFirst[0]).toEqual([
        'slot topping prompt "What topping would you like on your pizza?"',
      ]);
      // nested insertion pair in the trace, then two flat pairs
      expect(state.trace).toBe("(Ic Rs) (Is (Ic Rs) Rc) (Is Rc) (Is Rc)");
      // finished: slots all filled, input disabled
      expect(state.phase).toBe("completed");
      expect(inputDisabled(state)).toBe(true);
      expect(Object.fromEntries(state.slots.map((r) => [r.name, r.value]))).toEqual({
        size: "medium",
        topping: "sausage",
        crust: "deep dish",
        verify: "yes",
      });
    } finally {
      globalThis.fetch = realFetch;
    }
  });

  it("keeps two sessions independent", async () => {
    const realFetch = globalThis.fetch;
    globalThis.fetch = patchedFetch;
    try {
      const a = await createSession("pizza");
      const b = await createSession("pizza");
      expect(a.sessionId).not.toBe(b.sessionId);
      await postUtterance(a.sessionId, "large");
      const bAfter = await getSession(b.sessionId);
      expect(bAfter.slots.size).toBeNull();
    } finally {
      globalThis.fetch = realFetch;
    }
  });
});
