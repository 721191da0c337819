"""Deterministic stand-in for the chat and embedding endpoints.

Used by CI and the acceptance suite so the full pipeline runs without a
real model.  Three chat behaviors are supported:

* ``no-term``: always answers "No term";
* ``gold-echo``: answers with the gold terms of the query sentence,
  looked up by exact text in a supplied corpus;
* ``echo-last-demo``: repeats the term list of the last demonstration in
  the prompt (with default ascending ordering this is the most similar
  demonstration).

The embeddings route returns unit vectors derived from a SHA-256 of the
input text, so identical texts always embed identically.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Mapping, Optional

import numpy as np

__all__ = ["MockLlmServer", "MODES"]

MODES = ("no-term", "gold-echo", "echo-last-demo")

_QUERY_LINE = re.compile(r"^Given sentence from the .+? domain: (?P<text>.*)$")
_TERMS_LINE = re.compile(r"^Terms: (?P<terms>.*)$")


def _hash_embedding(text: str, dim: int) -> list[float]:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "big")
    rng = np.random.Generator(np.random.PCG64(seed))
    vec = rng.standard_normal(dim)
    vec /= np.linalg.norm(vec)
    return [float(x) for x in vec]


def _answer(mode: str, prompt: str, gold_by_text: Mapping[str, tuple[str, ...]]) -> str:
    if mode == "no-term":
        return "No term"
    lines = prompt.splitlines()
    if mode == "gold-echo":
        # The final query line carries the sentence to annotate.
        for line in reversed(lines):
            m = _QUERY_LINE.match(line)
            if m:
                terms = gold_by_text.get(m.group("text"), ())
                return ", ".join(terms) if terms else "No term"
        return "No term"
    if mode == "echo-last-demo":
        for line in reversed(lines):
            m = _TERMS_LINE.match(line)
            if m:
                return m.group("terms")
        return "No term"
    raise ValueError(f"unknown mock mode {mode!r}")


class _Handler(BaseHTTPRequestHandler):
    server: "MockLlmServer"

    def log_message(self, *args):  # keep test output quiet
        pass

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        return json.loads(self.rfile.read(length).decode("utf-8"))

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        mock: MockLlmServer = self.server.mock  # type: ignore[attr-defined]
        mock.request_count += 1
        scripted = mock.next_scripted_status()
        if scripted:  # 0 or None means behave normally
            self._send_json(scripted, {"error": "scripted failure"})
            return
        payload = self._read_json()
        if self.path.rstrip("/").endswith("embeddings"):
            texts = payload["input"]
            if isinstance(texts, str):
                texts = [texts]
            data = [
                {"index": i, "embedding": _hash_embedding(t, mock.embedding_dim)}
                for i, t in enumerate(texts)
            ]
            self._send_json(200, {"data": data, "model": payload.get("model", "mock")})
            return
        prompt = payload["messages"][-1]["content"]
        text = _answer(mock.mode, prompt, mock.gold_by_text)
        self._send_json(
            200,
            {
                "id": f"mock-{mock.request_count}",
                "choices": [{"index": 0, "message": {"role": "assistant", "content": text}}],
                "usage": {"prompt_tokens": len(prompt.split()), "completion_tokens": len(text.split())},
            },
        )


class MockLlmServer:
    """Threaded HTTP server; use as a context manager in tests."""

    def __init__(
        self,
        mode: str = "no-term",
        gold_by_text: Optional[Mapping[str, tuple[str, ...]]] = None,
        embedding_dim: int = 16,
        port: int = 0,
    ):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.mode = mode
        self.gold_by_text = dict(gold_by_text or {})
        self.embedding_dim = embedding_dim
        self.request_count = 0
        self._scripted: list[int] = []
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer(("127.0.0.1", port), _Handler)
        self._httpd.mock = self  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    def script_statuses(self, statuses: list[int]) -> None:
        """Queue per-request HTTP error statuses; 0 means answer normally."""
        with self._lock:
            self._scripted = list(statuses)

    def next_scripted_status(self) -> Optional[int]:
        with self._lock:
            if self._scripted:
                return self._scripted.pop(0)
        return None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def chat_url(self) -> str:
        return f"http://127.0.0.1:{self.port}/v1/chat/completions"

    @property
    def embeddings_url(self) -> str:
        return f"http://127.0.0.1:{self.port}/v1/embeddings"

    def __enter__(self) -> "MockLlmServer":
        self._thread.start()
        return self

    def __exit__(self, *exc_info) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        self._thread.join(timeout=5)

    def serve_forever(self) -> None:
        """Blocking variant for the CLI subcommand."""
        try:
            self._httpd.serve_forever()
        finally:
            self._httpd.server_close()
