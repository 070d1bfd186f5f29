"""Remote decision oracle: a loopback HTTP server exposing any local oracle,
and a client that counts only successfully answered queries.

Wire contract: POST /decide with JSON {"shape": [...], "data": [row-major
floats]}; success answers {"label": <int>} with status 200. Malformed bodies
get 400, oversized ones 413. No retries anywhere: a retry would double-count
a query on the serving side.
"""
from __future__ import annotations

import json
import logging
import threading
import urllib.error
import urllib.request
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .errors import BindError, ProtocolError, RemoteError, TransportError
from .oracles import DecisionOracle

log = logging.getLogger(__name__)

DEFAULT_MAX_BODY = 64 * 1024 * 1024
DEFAULT_TIMEOUT = 10.0


def _make_handler(oracle: DecisionOracle, max_body: int):
    class DecideHandler(BaseHTTPRequestHandler):
        def do_POST(self):
            if self.path != "/decide":
                self._reply(404, {"error": "unknown endpoint"})
                return
            length = int(self.headers.get("Content-Length", 0))
            if length > max_body:
                self._reply(413, {"error": f"payload above {max_body} bytes"})
                return
            try:
                payload = json.loads(self.rfile.read(length))
                shape = tuple(int(s) for s in payload["shape"])
                data = np.asarray(payload["data"], dtype=np.float64)
                x = data.reshape(shape)
            except Exception:
                self._reply(400, {"error": "malformed decide request"})
                return
            try:
                label = oracle.decide(x)
            except Exception:
                self._reply(500, {"error": "oracle failure"})
                return
            self._reply(200, {"label": int(label)})

        def _reply(self, status: int, body: dict):
            raw = json.dumps(body).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(raw)))
            self.end_headers()
            self.wfile.write(raw)

        def log_message(self, fmt, *args):
            log.debug("server: " + fmt, *args)

    return DecideHandler


class ServerHandle:
    """Running loopback oracle server; close() shuts it down cleanly."""

    def __init__(self, server: ThreadingHTTPServer, thread: threading.Thread):
        self._server = server
        self._thread = thread
        self.host, self.port = server.server_address[:2]

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def close(self) -> None:
        self._server.shutdown()
        self._thread.join()
        self._server.server_close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def serve(oracle: DecisionOracle, host: str = "127.0.0.1", port: int = 0,
          max_body: int = DEFAULT_MAX_BODY) -> ServerHandle:
    """Serve ``oracle`` over HTTP; port 0 picks a free one."""
    handler = _make_handler(oracle, max_body)
    try:
        server = ThreadingHTTPServer((host, port), handler)
    except OSError as exc:
        raise BindError(f"cannot bind {host}:{port}: {exc}") from exc
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    log.info("oracle server listening on %s:%s", *server.server_address[:2])
    return ServerHandle(server, thread)


class RemoteOracle(DecisionOracle):
    """Client side of the decide protocol; counts successful answers only."""

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT):
        super().__init__()
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def decide(self, x: np.ndarray) -> int:
        x = np.asarray(x, dtype=np.float64)
        body = json.dumps({"shape": list(x.shape),
                           "data": x.ravel().tolist()}).encode()
        request = urllib.request.Request(
            self.endpoint + "/decide", data=body,
            headers={"Content-Type": "application/json"}, method="POST")
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                raw = response.read()
        except urllib.error.HTTPError as exc:
            raise RemoteError(f"decide failed with status {exc.code}") from exc
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise TransportError(f"cannot reach {self.endpoint}: {exc}") from exc
        try:
            payload = json.loads(raw)
            label = int(payload["label"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed decide response: {raw[:200]!r}") from exc
        with self._lock:
            self._count += 1
        return label
