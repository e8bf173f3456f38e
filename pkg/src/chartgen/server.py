"""Local HTTP service exposing the engine.

Endpoints:
  POST /generalize  {spec, width, height, configOverrides?}
                    -> {svg, log, report, elapsedMs}
  GET  /health      -> {"status": "ok"}

Requests are stateless and processed independently; the engine's purity makes
concurrent handling safe without locks.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from chartgen.config import EngineConfig, config_from_dict
from chartgen.model import ChartSpecError, LayoutError, parse_chart_spec
from chartgen.pipeline import generalize
from chartgen.svg import render


class _Handler(BaseHTTPRequestHandler):
    base_config: EngineConfig = EngineConfig()

    # Silence per-request stderr logging; the service is often run under tests.
    def log_message(self, format: str, *args) -> None:
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self) -> None:  # CORS preflight for the browser playground
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "POST, GET, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self) -> None:
        if self.path == "/health":
            self._send_json(200, {"status": "ok"})
        else:
            self._send_json(404, {"error": {"message": f"no such endpoint {self.path}", "path": ""}})

    def do_POST(self) -> None:
        if self.path != "/generalize":
            self._send_json(404, {"error": {"message": f"no such endpoint {self.path}", "path": ""}})
            return
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            body = json.loads(raw) if raw else None
        except json.JSONDecodeError as exc:
            self._send_json(400, {"error": {"message": f"invalid JSON: {exc.msg}", "path": ""}})
            return
        if not isinstance(body, dict):
            self._send_json(400, {"error": {"message": "expected a JSON object body", "path": ""}})
            return
        try:
            for key in ("spec", "width", "height"):
                if key not in body:
                    raise ChartSpecError(key, "missing required key")
            spec = parse_chart_spec(body["spec"])
            width, height = body["width"], body["height"]
            for name, value in (("width", width), ("height", height)):
                if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
                    raise ChartSpecError(name, "expected a positive number")
            overrides = body.get("configOverrides") or {}
            if not isinstance(overrides, dict):
                raise ChartSpecError("configOverrides", "expected object")
            try:
                config = config_from_dict(overrides, base=self.base_config)
            except (ValueError, TypeError) as exc:
                raise ChartSpecError("configOverrides", str(exc)) from exc
        except ChartSpecError as exc:
            self._send_json(400, {"error": {"message": exc.message, "path": exc.path}})
            return
        try:
            chart = generalize(spec, (float(width), float(height)), config)
        except LayoutError as exc:
            self._send_json(422, {"error": {"message": str(exc), "path": "width/height"}})
            return
        self._send_json(
            200,
            {
                "svg": render(chart),
                "log": [entry.to_dict() for entry in chart.log],
                "report": chart.report.to_dict(),
                "elapsedMs": chart.elapsed_ms,
            },
        )


def create_server(host: str, port: int, config: EngineConfig) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"base_config": config})
    return ThreadingHTTPServer((host, port), handler)


def start_in_thread(host: str, port: int, config: EngineConfig) -> tuple[ThreadingHTTPServer, threading.Thread]:
    """Start the server on a background thread (port 0 picks a free port)."""
    server = create_server(host, port, config)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread


def run_server(host: str, port: int, config: EngineConfig) -> None:
    server = create_server(host, port, config)
    print(f"chartgen serving on http://{host}:{server.server_address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
