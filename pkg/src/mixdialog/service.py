"""Session-oriented HTTP API over the engine.

Endpoints (JSON bodies):

    POST /api/sessions                {"script": "pizza"}   -> 201 snapshot
    POST /api/sessions/{id}/utterances {"text": "medium"}   -> 200 snapshot
    GET  /api/sessions/{id}                                 -> 200 snapshot
    GET  /api/scripts                                       -> 200 ["pizza", ...]

Sessions live in memory and expire after 30 idle minutes. Requests for the
same session are serialized; distinct sessions proceed concurrently. Any other
GET path is served from the optional static UI directory.
"""

from __future__ import annotations

import json
import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .engine import (
    EngineConfig,
    Session,
    SystemAck,
    SystemPrompt,
    SystemSay,
    UserUtterance,
    load_bundle,
    new_session,
    next_output,
    submit_utterance,
)
from .errors import DialogError, SessionNotActiveError
from .grammar import Grammar
from .script import DialogScript, render_script
from .trace import build_trace, render_notation

DEFAULT_PORT = 8737
IDLE_EXPIRY_SECONDS = 30 * 60


@dataclass
class _Entry:
    session: Session
    script_id: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)


class SessionHub:
    """In-memory session registry keyed by opaque ids."""

    def __init__(
        self,
        bundles: dict[str, tuple[DialogScript, dict[str, Grammar]]],
        config: EngineConfig = EngineConfig(),
        idle_expiry: float = IDLE_EXPIRY_SECONDS,
    ):
        self.bundles = bundles
        self.config = config
        self.idle_expiry = idle_expiry
        self._sessions: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    def script_ids(self) -> list[str]:
        return sorted(self.bundles)

    def create(self, script_id: str) -> tuple[str, _Entry]:
        script, grammars = self.bundles[script_id]
        session = new_session(script, grammars, self.config)
        next_output(session)
        session_id = uuid.uuid4().hex
        entry = _Entry(session, script_id)
        with self._lock:
            self._sweep()
            self._sessions[session_id] = entry
        return session_id, entry

    def get(self, session_id: str) -> _Entry | None:
        with self._lock:
            self._sweep()
            entry = self._sessions.get(session_id)
            if entry is not None:
                entry.last_used = time.monotonic()
            return entry

    def _sweep(self) -> None:
        cutoff = time.monotonic() - self.idle_expiry
        stale = [sid for sid, e in self._sessions.items() if e.last_used < cutoff]
        for sid in stale:
            del self._sessions[sid]


def _render_turn(turn) -> dict:
    if isinstance(turn, SystemPrompt):
        return {"speaker": "S", "kind": "prompt", "text": turn.text, "slot": turn.slot}
    if isinstance(turn, SystemAck):
        return {"speaker": "S", "kind": "ack", "text": turn.text}
    if isinstance(turn, SystemSay):
        return {"speaker": "S", "kind": "say", "text": turn.text}
    assert isinstance(turn, UserUtterance)
    return {
        "speaker": "C",
        "kind": "utterance",
        "text": turn.text,
        "classification": turn.classification.value,
        "fills": [
            {"slot": f.slot, "value": f.value, "span": list(f.span)} for f in turn.fills
        ],
    }


def snapshot(session_id: str, entry: _Entry) -> dict:
    session = entry.session
    log = session.turn_log
    last_user = max(
        (i for i, t in enumerate(log) if isinstance(t, UserUtterance)), default=-1
    )
    pending = [t.text for t in log[last_user + 1 :] if not isinstance(t, UserUtterance)]
    slots: dict[str, str | None] = {}
    filled_at: dict[str, int] = {}
    for name in session.original.declared_slots():
        if name in session.store:
            slots[name] = session.store[name].value
            filled_at[name] = session.store[name].filled_at_turn
        else:
            slots[name] = None
    return {
        "sessionId": session_id,
        "script": entry.script_id,
        "phase": session.phase.value,
        "pendingPrompts": pending,
        "slots": slots,
        "filledAt": filled_at,
        "residualScript": render_script(session.residual),
        "traceNotation": render_notation(
            build_trace(log, session.config.greeting_as_response)
        ),
        "turnLog": [_render_turn(t) for t in log],
    }


_SESSION_PATH = re.compile(r"^/api/sessions/([0-9a-f]+)$")
_UTTERANCE_PATH = re.compile(r"^/api/sessions/([0-9a-f]+)/utterances$")


class _Handler(BaseHTTPRequestHandler):
    server_version = "mixdialog"
    hub: SessionHub  # set by make_server
    ui_dir: Path | None

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self) -> dict | None:
        try:
            length = int(self.headers.get("Content-Length", "0"))
            return json.loads(self.rfile.read(length) or b"{}")
        except (ValueError, json.JSONDecodeError):
            return None

    def do_GET(self) -> None:
        if self.path == "/api/scripts":
            self._send_json(200, self.hub.script_ids())
            return
        m = _SESSION_PATH.match(self.path)
        if m:
            entry = self.hub.get(m.group(1))
            if entry is None:
                self._send_json(404, {"error": "unknown session"})
                return
            with entry.lock:
                self._send_json(200, snapshot(m.group(1), entry))
            return
        if self.path.startswith("/api/"):
            self._send_json(404, {"error": "not found"})
            return
        self._serve_static()

    def do_POST(self) -> None:
        if self.path == "/api/sessions":
            body = self._read_json()
            if body is None or not isinstance(body.get("script"), str):
                self._send_json(400, {"error": "expected {\"script\": ...}"})
                return
            script_id = body["script"]
            if script_id not in self.hub.bundles:
                self._send_json(404, {"error": f"unknown script {script_id!r}"})
                return
            session_id, entry = self.hub.create(script_id)
            with entry.lock:
                self._send_json(201, snapshot(session_id, entry))
            return
        m = _UTTERANCE_PATH.match(self.path)
        if m:
            body = self._read_json()
            if body is None or not isinstance(body.get("text"), str):
                self._send_json(400, {"error": "expected {\"text\": ...}"})
                return
            entry = self.hub.get(m.group(1))
            if entry is None:
                self._send_json(404, {"error": "unknown session"})
                return
            with entry.lock:
                try:
                    submit_utterance(entry.session, body["text"])
                    next_output(entry.session)
                except SessionNotActiveError as exc:
                    self._send_json(409, {"error": str(exc)})
                    return
                except DialogError as exc:
                    self._send_json(409, {"error": str(exc)})
                    return
                self._send_json(200, snapshot(m.group(1), entry))
            return
        self._send_json(404, {"error": "not found"})

    def _serve_static(self) -> None:
        if self.ui_dir is None:
            self._send_json(404, {"error": "no UI assets configured"})
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not target.is_relative_to(self.ui_dir.resolve()) or not target.is_file():
            # single-page app fallback
            target = self.ui_dir / "index.html"
            if not target.is_file():
                self._send_json(404, {"error": "not found"})
                return
        ctype = {
            ".html": "text/html",
            ".js": "text/javascript",
            ".css": "text/css",
            ".json": "application/json",
            ".svg": "image/svg+xml",
        }.get(target.suffix, "application/octet-stream")
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def load_script_dir(scripts_dir: str | Path) -> dict[str, tuple[DialogScript, dict[str, Grammar]]]:
    """Each *.dlg in the directory becomes a bundle keyed by its stem."""
    scripts_dir = Path(scripts_dir)
    bundles = {}
    for path in sorted(scripts_dir.glob("*.dlg")):
        script, grammars = load_bundle(path)
        bundles[path.stem] = (script, grammars)
    if not bundles:
        raise DialogError(f"no .dlg scripts found in {scripts_dir}")
    return bundles


def make_server(
    hub: SessionHub, port: int = DEFAULT_PORT, ui_dir: str | Path | None = None
) -> ThreadingHTTPServer:
    handler = type("Handler", (_Handler,), {"hub": hub, "ui_dir": Path(ui_dir) if ui_dir else None})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(
    scripts_dir: str | Path,
    port: int = DEFAULT_PORT,
    ui_dir: str | Path | None = None,
    config: EngineConfig = EngineConfig(),
) -> None:
    hub = SessionHub(load_script_dir(scripts_dir), config)
    server = make_server(hub, port, ui_dir)
    print(f"serving on http://127.0.0.1:{server.server_address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
