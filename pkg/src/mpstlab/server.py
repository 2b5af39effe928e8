"""Small HTTP host for the bridge and the built web UI.

POST /api takes a full bridge request; /api/<op> fixes the op.  The two GET
ops (examples, presets) are also reachable by GET.  Everything else serves
static files from the UI directory, when one is configured.
"""

from __future__ import annotations

import json
import mimetypes
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .bridge import OPS, handle


def _find_ui_dir(explicit: str | None) -> Path | None:
    if explicit:
        path = Path(explicit)
        return path if path.is_dir() else None
    for candidate in (Path.cwd() / "frontend" / "dist", Path.cwd() / "dist"):
        if candidate.is_dir():
            return candidate
    return None


class BridgeHandler(BaseHTTPRequestHandler):
    ui_dir: Path | None = None

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send_json(self, status: int, body: dict) -> None:
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _api_op(self) -> str | None:
        if self.path == "/api":
            return ""
        if self.path.startswith("/api/"):
            op = self.path[len("/api/"):].split("?", 1)[0]
            return op
        return None

    def do_POST(self):  # noqa: N802 (stdlib naming)
        op = self._api_op()
        if op is None:
            self._send_json(404, {"ok": False, "payload": None,
                                  "error": {"kind": "NotFound", "message": self.path}})
            return
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b"{}"
        try:
            request = json.loads(raw.decode("utf-8"))
            if not isinstance(request, dict):
                raise ValueError("request body must be a JSON object")
        except (ValueError, UnicodeDecodeError) as exc:
            self._send_json(400, {"ok": False, "payload": None, "error": {
                "kind": "ParseError", "message": f"malformed JSON body: {exc}",
                "line": 1, "column": 1,
            }})
            return
        if op:
            request["op"] = op
        response = handle(request)
        self._send_json(200 if response["ok"] else 400, response)

    def do_GET(self):  # noqa: N802
        op = self._api_op()
        if op in ("examples", "presets"):
            self._send_json(200, handle({"op": op}))
            return
        if op is not None:
            self._send_json(405, {"ok": False, "payload": None,
                                  "error": {"kind": "MethodNotAllowed", "message": "use POST"}})
            return
        self._serve_static()

    def _serve_static(self):
        if self.ui_dir is None:
            if self.path in ("/", "/index.html"):
                body = (b"<!doctype html><title>mpst bridge</title>"
                        b"<p>Bridge is up. POST to /api; no UI assets configured.</p>")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self.send_error(404)
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self.send_error(404)
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def make_server(port: int, ui_dir: str | None = None) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (BridgeHandler,), {"ui_dir": _find_ui_dir(ui_dir)})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(port: int, ui_dir: str | None = None) -> int:
    try:
        httpd = make_server(port, ui_dir)
    except OSError as exc:
        print(f"error: cannot bind port {port}: {exc.strerror or exc}", file=sys.stderr)
        return 2
    where = httpd.server_address
    ui = getattr(httpd.RequestHandlerClass, "ui_dir", None)
    print(f"serving on http://{where[0]}:{where[1]}"
          + (f" (UI from {ui})" if ui else " (bridge only)"), flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        print("\nshutting down")
    finally:
        httpd.server_close()
    return 0
