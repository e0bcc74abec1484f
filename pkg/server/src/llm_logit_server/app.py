"""The HTTP surface: request validation, scoring, and the threaded server.

``score_request`` is a pure function from (state, parsed body) to
(status, response body) so the contract is unit-testable without sockets;
the handler classes only move bytes.  Model access is serialized with a
lock, and nothing is retained between requests.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

LOGITS_PATH = "/v1/logits"
HEALTH_PATH = "/healthz"


@dataclass
class AppState:
    model: object | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _bad(reason: str) -> tuple[int, dict]:
    return 400, {"error": reason}


def score_request(state: AppState, payload: object) -> tuple[int, dict]:
    """Validate one logits request and score it; (status, body)."""
    if not isinstance(payload, dict):
        return _bad("request body must be a JSON object")
    prompt = payload.get("prompt")
    if not isinstance(prompt, str):
        return _bad("'prompt' must be a string")
    if prompt == "":
        return _bad("'prompt' must be non-empty")
    candidates = payload.get("candidates")
    if not isinstance(candidates, list) or not candidates:
        return _bad("'candidates' must be a non-empty list of strings")
    if not all(isinstance(c, str) and c for c in candidates):
        return _bad("'candidates' must be a non-empty list of non-empty strings")

    if state.model is None:
        return 503, {"error": "model not loaded"}

    with state.lock:
        logits = state.model.next_token_logits(prompt)
        picked = [float(logits[state.model.first_token_id(c)]) for c in candidates]
    if not all(math.isfinite(x) for x in picked):
        return 500, {"error": "model produced non-finite logits"}
    return 200, {"logits": picked, "model": state.model.name}


def health(state: AppState) -> tuple[int, dict]:
    if state.model is None:
        return 503, {"status": "unavailable"}
    return 200, {"status": "ok", "model": state.model.name}


class _Handler(BaseHTTPRequestHandler):
    server: "LogitServer"

    def _send(self, status: int, body: dict) -> None:
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self) -> None:
        if self.path == HEALTH_PATH:
            self._send(*health(self.server.state))
        else:
            self._send(404, {"error": "not found"})

    def do_POST(self) -> None:
        if self.path != LOGITS_PATH:
            self._send(404, {"error": "not found"})
            return
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._send(*_bad("request body is not valid JSON"))
            return
        self._send(*score_request(self.server.state, payload))

    def log_message(self, fmt: str, *args) -> None:  # keep test output quiet
        pass


class LogitServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], state: AppState):
        super().__init__(address, _Handler)
        self.state = state


def make_server(host: str, port: int, model) -> LogitServer:
    """Bind a threaded server; port 0 picks a free port."""
    return LogitServer((host, port), AppState(model=model))
