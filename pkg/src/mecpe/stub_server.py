"""A tiny HTTP server speaking the /generate contract, for tests and local
runs without a real generative model.

Responses are looked up by exact prompt text; unknown prompts get the
configured default (empty text, i.e. no-cause downstream).

    python -m mecpe.stub_server fixture.json --port 8631

where fixture.json maps prompt text -> response text.
"""

from __future__ import annotations

import argparse
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path


class StubLLMServer:
    def __init__(
        self,
        responses: dict[str, str] | None = None,
        default: str = "",
        delay: float = 0.0,
        port: int = 0,
    ):
        self.responses = dict(responses or {})
        self.default = default
        self.delay = delay
        self._lock = threading.Lock()
        self.request_count = 0
        self.in_flight = 0
        self.peak_in_flight = 0
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def do_POST(self):
                if self.path != "/generate":
                    self.send_error(404)
                    return
                length = int(self.headers.get("Content-Length", 0))
                try:
                    body = json.loads(self.rfile.read(length).decode("utf-8"))
                    prompt = body["prompt"]
                except (json.JSONDecodeError, KeyError, UnicodeDecodeError):
                    self.send_error(400, "body must be JSON with a 'prompt' field")
                    return
                with server._lock:
                    server.request_count += 1
                    server.in_flight += 1
                    server.peak_in_flight = max(server.peak_in_flight, server.in_flight)
                try:
                    if server.delay:
                        time.sleep(server.delay)
                    text = server.responses.get(prompt, server.default)
                finally:
                    with server._lock:
                        server.in_flight -= 1
                payload = json.dumps({"text": text}).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        self._httpd = ThreadingHTTPServer(("127.0.0.1", port), Handler)
        self._thread: threading.Thread | None = None

    @property
    def endpoint(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "StubLLMServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread:
            self._thread.join()

    def __enter__(self) -> "StubLLMServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("fixture", help="JSON file mapping prompt text to response text")
    parser.add_argument("--port", type=int, default=8631)
    parser.add_argument("--delay", type=float, default=0.0, help="seconds to sleep per request")
    args = parser.parse_args(argv)
    responses = json.loads(Path(args.fixture).read_text(encoding="utf-8"))
    server = StubLLMServer(responses, delay=args.delay, port=args.port)
    print(f"stub LLM server listening on {server.endpoint}/generate")
    try:
        server._httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
