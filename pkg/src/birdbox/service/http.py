"""Minimal threaded HTTP API over the detection store.

Routes:
    GET /api/detections?after=<seq>&limit=<n>
        -> {"records": [...], "latest_seq": n, "evicted_before": n}
    GET /api/status      -> SystemStatus wire object
    GET /, /assets/*     -> static files from the configured directory

Home-network deployment: no auth, no TLS, polling only.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import posixpath
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .store import DetectionStore

log = logging.getLogger(__name__)

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>birdbox</title></head>
<body><h1>birdbox detection service</h1>
<p>No dashboard bundle configured. The API lives under <code>/api/</code>:</p>
<ul><li><a href="/api/status">/api/status</a></li>
<li><a href="/api/detections?after=0">/api/detections?after=0</a></li></ul>
</body></html>
"""

DEFAULT_QUERY_LIMIT = 500


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    store: DetectionStore = None
    static_dir: Path | None = None

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("http: " + fmt, *args)

    def _send_json(self, payload, status=200):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Cache-Control", "no-store")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status, message):
        self._send_json({"error": message}, status=status)

    def do_GET(self):  # noqa: N802 - http.server naming
        parsed = urlparse(self.path)
        route = parsed.path
        if route == "/api/detections":
            self._detections(parse_qs(parsed.query))
        elif route == "/api/status":
            self._send_json(self.store.status().to_wire())
        else:
            self._static(route)

    def _detections(self, query):
        try:
            after = int(query.get("after", ["0"])[0])
            limit = int(query.get("limit", [str(DEFAULT_QUERY_LIMIT)])[0])
            if after < 0 or limit < 0:
                raise ValueError("negative parameter")
        except ValueError as exc:
            self._send_error_json(400, f"bad query parameter: {exc}")
            return
        records = self.store.query_since(after, limit)
        self._send_json({
            "records": [r.to_wire() for r in records],
            "latest_seq": self.store.latest_seq(),
            "evicted_before": self.store.evicted_before(),
        })

    def _static(self, route):
        if route in ("", "/"):
            route = "/index.html"
        if self.static_dir is None:
            if route == "/index.html":
                body = _PLACEHOLDER_PAGE.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._send_error_json(404, "no static directory configured")
            return
        clean = posixpath.normpath(route.lstrip("/"))
        if clean.startswith("..") or clean.startswith("/"):
            self._send_error_json(403, "path escapes the static directory")
            return
        target = (self.static_dir / clean).resolve()
        try:
            target.relative_to(self.static_dir.resolve())
        except ValueError:
            self._send_error_json(403, "path escapes the static directory")
            return
        if not target.is_file():
            self._send_error_json(404, f"no such asset: {route}")
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class DetectionService:
    """Owns the HTTP server thread over a DetectionStore."""

    def __init__(self, store: DetectionStore, listen: str = "0.0.0.0:8080",
                 static_dir=None):
        host, _, port = listen.rpartition(":")
        handler = type("BoundHandler", (_Handler,), {
            "store": store,
            "static_dir": Path(static_dir) if static_dir else None,
        })
        self.store = store
        self.server = ThreadingHTTPServer((host or "0.0.0.0", int(port)), handler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> str:
        host, port = self.server.server_address[:2]
        return f"{host}:{port}"

    @property
    def port(self) -> int:
        return self.server.server_address[1]

    def start(self):
        self._thread = threading.Thread(target=self.server.serve_forever,
                                        name="birdbox-http", daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self.server.shutdown()
        self.server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
