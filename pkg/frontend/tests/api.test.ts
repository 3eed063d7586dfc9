import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, createSession, getSession, listScripts, postUtterance } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("lists scripts", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(200, ["pizza"])));
    expect(await listScripts()).toEqual(["pizza"]);
  });

  it("posts the script id on create", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(201, { sessionId: "s1" }));
    vi.stubGlobal("fetch", fetchMock);
    const snap = await createSession("pizza");
    expect(snap.sessionId).toBe("s1");
    const [path, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(path).toBe("/api/sessions");
    expect(JSON.parse(String(init.body))).toEqual({ script: "pizza" });
  });

  it("addresses the session when posting utterances", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(200, { sessionId: "s1" }));
    vi.stubGlobal("fetch", fetchMock);
    await postUtterance("s1", "medium");
    expect(fetchMock.mock.calls[0][0]).toBe("/api/sessions/s1/utterances");
  });

  it("surfaces server errors with status and message", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(409, { error: "session is completed" })));
    await expect(postUtterance("s1", "more")).rejects.toThrowError(ApiError);
    await expect(postUtterance("s1", "more")).rejects.toMatchObject({
      status: 409,
      message: "session is completed",
    });
  });

  it("maps unknown sessions to 404", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(404, { error: "unknown session" })));
    await expect(getSession("nope")).rejects.toMatchObject({ status: 404 });
  });

  it("wraps network failures as status 0", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => {
      throw new TypeError("boom");
    }));
    await expect(listScripts()).rejects.toMatchObject({ status: 0 });
  });
});
