"""
Shared fixtures: the Prefect test harness, a loopback stand-in for the remote
model server and paths to the bundled scenario and run logs.
"""

from __future__ import annotations

import json
import os
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Dict, Iterator, List

import pytest
from prefect.testing.utilities import prefect_test_harness


ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DEMO_SCENARIO = os.path.join(ROOT, "demo", "hallway.json")
FIXTURES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


@pytest.fixture(scope="session")
def prefect_harness() -> Iterator[None]:
    """Run flows against a temporary Prefect database."""
    with prefect_test_harness():
        yield


@pytest.fixture(scope="session")
def demo_path() -> str:
    """Bundled hallway scenario."""
    return DEMO_SCENARIO


@pytest.fixture
def fixture_path():
    """Path of a bundled run log."""

    def _path(name: str) -> str:
        return os.path.join(FIXTURES_DIR, name)

    return _path


class StubModelServer(ThreadingHTTPServer):
    """Loopback model server answering every POST from a script."""

    def __init__(self):
        super().__init__(("127.0.0.1", 0), _StubHandler)
        self.answer: Dict[str, Any] | str = {"text": "CLEAR: nothing RESUME"}
        self.delay_s = 0.0
        self.status = 200
        self.requests: List[Dict[str, Any]] = []

    @property
    def base_url(self) -> str:
        """Root URL of the server."""
        host, port = self.server_address[:2]
        return f"http://{host!s}:{port}"


class _StubHandler(BaseHTTPRequestHandler):
    server: StubModelServer

    def do_POST(self):  # pylint: disable=invalid-name
        """Record the request and send the scripted answer."""
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        self.server.requests.append(
            {
                "path": self.path,
                "body": body,
                "authorization": self.headers.get("Authorization"),
            }
        )
        if self.server.delay_s:
            time.sleep(self.server.delay_s)

        answer = self.server.answer
        payload = answer if isinstance(answer, str) else json.dumps(answer)
        data = payload.encode("utf-8")
        try:
            self.send_response(self.server.status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)
        except (BrokenPipeError, ConnectionResetError):
            # client gave up after its timeout
            pass

    def log_message(self, format, *args):  # pylint: disable=redefined-builtin
        pass


@pytest.fixture
def stub_server(monkeypatch) -> Iterator[StubModelServer]:
    """Model server on a free loopback port, with an API key in the environment."""
    monkeypatch.setenv("PATROL_API_KEY", "test-key")
    server = StubModelServer()
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        server.server_close()
