"""HTTP classification service backing the browser extension.

Endpoints (JSON bodies):

  POST /classify  {"url": ..., "html": optional, "client_version": optional}
                  -> {"verdict": {"label", "score"}, "is_fhd", "fhd_name",
                      "model_version", "cache", "note"?}
  GET  /health    -> {"status", "model_version", "registry_size"}
  GET  /registry  -> {"base_domains": [...]}

Non-FHD URLs short-circuit to a benign verdict with score 0 (the registry
filter is the model's scope). URLs the service cannot fetch yield a definite
"unknown" verdict with an "unfetched" note rather than an error or a hang.
Binds loopback by default; transport security is deployment configuration.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Callable

from .errors import FreephishError, TransportError, UrlError
from .features import ExtractorConfig, default_config, extract_features
from .forest import Forest, load_forest, predict
from .registry import Registry, canonicalize, load_registry, match_fhd
from .snapshots import (Discovery, Fetcher, Snapshot, extract_linked_targets,
                        snapshot_id)

log = logging.getLogger(__name__)

DEFAULT_CACHE_TTL = 900.0  # seconds


class VerdictCache:
    """TTL-bounded verdict cache; the only shared mutable service state."""

    def __init__(self, ttl: float, clock: Callable[[], float] = time.monotonic):
        self._ttl = ttl
        self._clock = clock
        self._entries: dict[str, tuple[float, dict]] = {}
        self._lock = threading.Lock()

    def get(self, key: str) -> dict | None:
        now = self._clock()
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                return None
            stored_at, payload = entry
            if now - stored_at > self._ttl:
                del self._entries[key]
                return None
            return dict(payload)

    def put(self, key: str, payload: dict) -> None:
        with self._lock:
            self._entries[key] = (self._clock(), dict(payload))


@dataclass
class ServiceConfig:
    model_path: str | Path
    registry_path: str | Path
    host: str = "127.0.0.1"
    port: int = 8787
    cache_ttl: float = DEFAULT_CACHE_TTL
    fetcher: Fetcher | None = None
    extractor_config: ExtractorConfig | None = None
    cache_clock: Callable[[], float] = time.monotonic


class ClassifierService:
    """Loads model and registry once; classification is thread-safe."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.registry: Registry = load_registry(config.registry_path)
        self.forest: Forest | None = None
        try:
            self.forest = load_forest(config.model_path)
        except (FileNotFoundError, FreephishError) as exc:
            log.warning("model not loaded: %s", exc)
        self.extractor_config = config.extractor_config or default_config()
        self.cache = VerdictCache(config.cache_ttl, clock=config.cache_clock)
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    @property
    def model_version(self) -> str | None:
        return self.forest.model_version if self.forest else None

    def health_payload(self) -> dict:
        return {
            "status": "ok" if self.forest else "model_unloaded",
            "model_version": self.model_version,
            "registry_size": len(self.registry),
        }

    def registry_payload(self) -> dict:
        return {"base_domains": self.registry.base_domains()}

    def classify(self, url: str, html: str | None = None,
                 client_version: str | None = None) -> dict:
        """Core classification; raises UrlError for unparseable URLs."""
        if self.forest is None:
            raise FreephishError("model unloaded")
        canonical = canonicalize(url)
        match = match_fhd(canonical, self.registry)
        if match is None:
            return {
                "verdict": {"label": "benign", "score": 0.0},
                "is_fhd": False,
                "fhd_name": None,
                "model_version": self.forest.model_version,
                "cache": False,
            }
        html_hash = hashlib.sha256((html or "").encode("utf-8")).hexdigest()[:16]
        key = f"{canonical.serialized}\n{html_hash}"
        cached = self.cache.get(key)
        if cached is not None:
            cached["cache"] = True
            return cached

        body = html
        note = None
        if body is None:
            if self.config.fetcher is None:
                note = "unfetched"
            else:
                try:
                    body = self.config.fetcher.fetch(canonical).body
                except TransportError as exc:
                    log.warning("classify fetch failed for %s: %s",
                                canonical.serialized, exc)
                    note = "unfetched"
        if body is None:
            payload = {
                "verdict": {"label": "unknown", "score": 0.0},
                "is_fhd": True,
                "fhd_name": match.entry.name,
                "model_version": self.forest.model_version,
                "cache": False,
                "note": note,
            }
            return payload

        now = dt.datetime.now(dt.timezone.utc)
        snapshot = Snapshot(
            id=snapshot_id(canonical.serialized, now, body),
            url=canonical,
            fetch_time=now,
            http_status=200,
            headers=(),
            body=body,
            discovery=Discovery(source="manual", first_seen=now),
            linked_targets=extract_linked_targets(body),
        )
        vector = extract_features(snapshot, self.registry, self.extractor_config,
                                  fetcher=self.config.fetcher)
        verdict = predict(self.forest, vector)
        payload = {
            "verdict": {"label": verdict.label, "score": verdict.score},
            "is_fhd": True,
            "fhd_name": match.entry.name,
            "target_brand": vector.target_brand,
            "model_version": verdict.model_version,
            "cache": False,
        }
        self.cache.put(key, payload)
        return payload

    # -- HTTP plumbing ----------------------------------------------------

    def start(self) -> int:
        """Start serving on a background thread; returns the bound port."""
        handler = _make_handler(self)
        self._server = ThreadingHTTPServer((self.config.host, self.config.port), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self._server.server_address[1]

    def serve_forever(self) -> None:
        handler = _make_handler(self)
        self._server = ThreadingHTTPServer((self.config.host, self.config.port), handler)
        host, port = self._server.server_address[:2]
        print(f"serving on {host}:{port}", flush=True)
        self._server.serve_forever()

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None


def _make_handler(service: ClassifierService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            log.debug("http: " + fmt, *args)

        def _send(self, status: int, payload: dict):
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/health":
                self._send(200, service.health_payload())
            elif self.path == "/registry":
                self._send(200, service.registry_payload())
            else:
                self._send(404, {"error": "not found"})

        def do_POST(self):
            if self.path != "/classify":
                self._send(404, {"error": "not found"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                request = json.loads(self.rfile.read(length) or b"{}")
            except (ValueError, json.JSONDecodeError):
                self._send(400, {"error": "malformed JSON body"})
                return
            url = request.get("url")
            if not url or not isinstance(url, str):
                self._send(400, {"error": "url is required"})
                return
            if service.forest is None:
                self._send(503, {"error": "model unloaded"})
                return
            try:
                payload = service.classify(
                    url, html=request.get("html"),
                    client_version=request.get("client_version"))
            except UrlError as exc:
                self._send(400, {"error": str(exc)})
                return
            self._send(200, payload)

    return Handler
