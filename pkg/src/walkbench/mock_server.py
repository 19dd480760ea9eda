"""A scripted chat-completions endpoint for offline protocol tests.

The server answers ``POST .../chat/completions`` by asking a script what to
do with the n-th request. Scripts are plain callables, so tests can return
tool calls, final text, HTTP errors, or stall past the client timeout.
"""

from __future__ import annotations

import argparse
import json
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable


@dataclass
class MockReply:
    status: int = 200
    body: dict | None = None
    delay: float = 0.0


Script = Callable[[dict, int], MockReply]


def _completion(message: dict, finish: str) -> dict:
    return {
        "id": "chatcmpl-mock",
        "object": "chat.completion",
        "model": "mock",
        "choices": [{"index": 0, "message": {"role": "assistant", **message}, "finish_reason": finish}],
        "usage": {"prompt_tokens": 10, "completion_tokens": 5, "total_tokens": 15},
    }


def tool_calls_reply(*calls: tuple[str, dict | str]) -> MockReply:
    """Reply with tool calls; string arguments are sent as-is (handy for malformed JSON)."""
    wire = []
    for i, (name, args) in enumerate(calls):
        raw = args if isinstance(args, str) else json.dumps(args)
        wire.append({"id": f"call_{i}", "type": "function", "function": {"name": name, "arguments": raw}})
    return MockReply(body=_completion({"content": None, "tool_calls": wire}, "tool_calls"))


def text_reply(text: str) -> MockReply:
    return MockReply(body=_completion({"content": text}, "stop"))


def sequence(replies: list[MockReply]) -> Script:
    """Play replies in order, repeating the last one forever."""
    return lambda request, i: replies[min(i, len(replies) - 1)]


def think_forever() -> Script:
    return lambda request, i: tool_calls_reply(("think", {"thought": f"still thinking ({i})"}))


@dataclass
class MockChatServer:
    script: Script
    host: str = "127.0.0.1"
    port: int = 0
    requests: list[dict] = field(default_factory=list)

    def __post_init__(self):
        owner = self
        lock = threading.Lock()

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                if not self.path.rstrip("/").endswith("/chat/completions"):
                    self._send(404, {"error": {"message": f"no route {self.path}"}})
                    return
                length = int(self.headers.get("Content-Length", 0))
                try:
                    body = json.loads(self.rfile.read(length) or b"{}")
                except json.JSONDecodeError:
                    self._send(400, {"error": {"message": "request body is not JSON"}})
                    return
                with lock:
                    index = len(owner.requests)
                    owner.requests.append(body)
                reply = owner.script(body, index)
                if reply.delay:
                    time.sleep(reply.delay)
                self._send(reply.status, reply.body if reply.body is not None else {"error": {"message": "scripted error"}})

            def _send(self, status: int, payload: dict):
                data = json.dumps(payload).encode()
                try:
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except (BrokenPipeError, ConnectionResetError):
                    pass  # client gave up (timeout tests)

            def log_message(self, format, *args):
                pass

        self._server = ThreadingHTTPServer((self.host, self.port), Handler)
        self._server.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/v1"

    def start(self) -> "MockChatServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "MockChatServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description="Serve a scripted chat-completions endpoint.")
    ap.add_argument("--port", type=int, default=8765)
    ap.add_argument("--mode", choices=["final", "think-forever"], default="final")
    ap.add_argument("--answer", default="[]", help="final text returned in 'final' mode")
    args = ap.parse_args(argv)
    script = think_forever() if args.mode == "think-forever" else sequence([text_reply(args.answer)])
    server = MockChatServer(script, port=args.port)
    print(f"serving on {server.url}", flush=True)
    try:
        server._server.serve_forever()
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
