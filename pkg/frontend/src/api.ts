// Typed client for the dialog session API.

export interface TurnView {
  speaker: "S" | "C";
  kind: "say" | "prompt" | "ack" | "utterance";
  text: string;
  slot?: string;
  classification?: string;
  fills?: { slot: string; value: string; span: [number, number] }[];
}

export interface SessionSnapshot {
  sessionId: string;
  script: string;
  phase: "active" | "completed" | "aborted";
  pendingPrompts: string[];
  slots: Record<string, string | null>;
  filledAt: Record<string, number>;
  residualScript: string;
  traceNotation: string;
  turnLog: TurnView[];
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(path, init);
  } catch (err) {
    throw new ApiError(0, `network error: ${String(err)}`);
  }
  let body: unknown = null;
  try {
    body = await resp.json();
  } catch {
    // non-JSON error body; fall through with status only
  }
  if (!resp.ok) {
    const detail =
      body && typeof body === "object" && "error" in body
        ? String((body as { error: unknown }).error)
        : resp.statusText;
    throw new ApiError(resp.status, detail);
  }
  return body as T;
}

export function listScripts(): Promise<string[]> {
  return request<string[]>("/api/scripts");
}

export function createSession(script: string): Promise<SessionSnapshot> {
  return request<SessionSnapshot>("/api/sessions", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ script }),
  });
}

export function postUtterance(sessionId: string, text: string): Promise<SessionSnapshot> {
  return request<SessionSnapshot>(`/api/sessions/${sessionId}/utterances`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ text }),
  });
}

export function getSession(sessionId: string): Promise<SessionSnapshot> {
  return request<SessionSnapshot>(`/api/sessions/${sessionId}`);
}
