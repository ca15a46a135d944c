import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlparse

import pytest

TESTS = Path(__file__).resolve().parent
DATA = TESTS / "data"
GOLDEN = TESTS / "golden"

sys.path.insert(0, str(TESTS))


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def golden_dir():
    return GOLDEN


class _RecordedHandler(BaseHTTPRequestHandler):
    """Serves tests/data/recorded/<coin>_<kind>.json for CoinGecko-shaped paths."""

    def do_GET(self):
        server = self.server
        server.log.append(self.path)
        parts = urlparse(self.path).path.strip("/").split("/")
        status = server.script.pop(0) if server.script else 200
        body = None
        if status == 200 and len(parts) >= 3 and parts[0] == "coins":
            kind = "range" if parts[-1] == "range" else "history"
            f = DATA / "recorded" / f"{parts[1]}_{kind}.json"
            if f.exists():
                body = f.read_bytes()
        if parts[:2] == ["coins", "garbage"]:
            body = b"<html>not json</html>"
        if body is None:
            status = status if status != 200 else 404
            body = b"{}"
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def recorded_server():
    """Local server replaying recorded responses; ``server.script`` queues status codes."""
    srv = ThreadingHTTPServer(("127.0.0.1", 0), _RecordedHandler)
    srv.log = []
    srv.script = []
    t = threading.Thread(target=srv.serve_forever, daemon=True)
    t.start()
    srv.base_url = f"http://127.0.0.1:{srv.server_address[1]}"
    yield srv
    srv.shutdown()
    srv.server_close()


# Acceptance criteria: tests marked ``criterion(n, title)`` roll up into one
# PASS/FAIL line per criterion in the terminal summary.
_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, [title, True, 0])
    entry[1] = entry[1] and not rep.failed
    entry[2] += rep.when == "call"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, checks = _CRITERIA[n]
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title} [{checks} test(s)]")
