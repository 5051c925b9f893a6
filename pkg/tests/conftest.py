from __future__ import annotations

import threading
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from types import SimpleNamespace

import pytest


class _QuietHandler(SimpleHTTPRequestHandler):
    def log_message(self, *args) -> None:
        pass


@pytest.fixture(scope="session")
def fixture_site(tmp_path_factory):
    """Local HTTP server over a writable docroot; tests drop files in
    site.root and fetch them at site.url."""
    root = tmp_path_factory.mktemp("site")
    server = ThreadingHTTPServer(
        ("127.0.0.1", 0), partial(_QuietHandler, directory=str(root))
    )
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    site = SimpleNamespace(root=root, url=f"http://127.0.0.1:{server.server_port}")
    yield site
    server.shutdown()


@pytest.fixture()
def unreachable_url() -> str:
    # port 9 (discard) is never listening in the sandbox
    return "http://127.0.0.1:9/page.html"
