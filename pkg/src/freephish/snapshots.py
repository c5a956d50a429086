"""Snapshot ingestion and the append-only snapshot corpus.

A snapshot is one fetched website: canonical URL, HTML body, headers,
discovery metadata and the page's outbound link targets. Snapshots are
persisted as newline-delimited JSON records, one per line, so corpora are
streamable, appendable and diff-able. Snapshot ids are content-addressed,
which makes re-ingesting an identical fetch a no-op.
"""

from __future__ import annotations

import base64
import datetime as dt
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Protocol

from .errors import CorpusError, TransportError
from .htmlscan import scan_page
from .registry import CanonicalUrl, Registry, canonicalize, match_fhd

log = logging.getLogger(__name__)

DISCOVERY_SOURCES = ("twitter", "facebook", "file", "manual")
LINK_KINDS = ("iframe", "button_link", "anchor")


@dataclass(frozen=True)
class LinkedTarget:
    kind: str
    href: str  # stored verbatim, un-canonicalized


@dataclass(frozen=True)
class Discovery:
    source: str
    first_seen: dt.datetime
    post_id: str | None = None


@dataclass(frozen=True)
class Download:
    filename: str
    byte_size: int
    content_hash: str


@dataclass(frozen=True)
class Snapshot:
    id: str
    url: CanonicalUrl
    fetch_time: dt.datetime
    http_status: int
    headers: tuple[tuple[str, str], ...]
    body: str
    discovery: Discovery
    linked_targets: tuple[LinkedTarget, ...] = ()
    download: Download | None = None
    screenshot_ref: str | None = None


@dataclass(frozen=True)
class FeedItem:
    url: str
    source: str
    observed_at: dt.datetime
    post_id: str | None = None


@dataclass(frozen=True)
class FetchResult:
    status: int
    headers: tuple[tuple[str, str], ...]
    body: str
    # populated when the page triggers a file download
    download: Download | None = None


class Fetcher(Protocol):
    def fetch(self, url: CanonicalUrl) -> FetchResult: ...


def snapshot_id(url_serialized: str, fetch_time: dt.datetime, body: str) -> str:
    body_hash = hashlib.sha256(body.encode("utf-8", errors="surrogatepass")).hexdigest()
    key = f"{url_serialized}\n{fetch_time.isoformat()}\n{body_hash}"
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:32]


def extract_linked_targets(body: str) -> tuple[LinkedTarget, ...]:
    """Collect iframe sources, button-styled links and plain anchors."""
    scan = scan_page(body)
    targets: list[LinkedTarget] = []
    for src in scan.iframe_srcs:
        targets.append(LinkedTarget(kind="iframe", href=src))
    for anchor in scan.anchors:
        if anchor.href is None:
            continue
        kind = "button_link" if anchor.wraps_button else "anchor"
        targets.append(LinkedTarget(kind=kind, href=anchor.href))
    for url in scan.button_onclick_urls:
        targets.append(LinkedTarget(kind="button_link", href=url))
    return tuple(targets)


class FixtureFetcher:
    """Deterministic fetcher backed by a manifest of canned responses.

    The manifest maps URL strings to response objects:
    ``{"status": 200, "body": "..."}`` or ``{"body_file": "page.html"}``,
    optionally with ``headers``, ``download`` and ``error`` ("timeout" etc.,
    raised as a TransportError). Unknown URLs raise TransportError.
    """

    def __init__(self, responses: dict[str, dict], root: Path | None = None):
        self._root = root
        self._responses: dict[str, dict] = {}
        for raw, spec in responses.items():
            self._responses[canonicalize(raw).serialized] = spec

    @classmethod
    def from_dir(cls, path: str | Path) -> "FixtureFetcher":
        root = Path(path)
        manifest = root / "manifest.json"
        with open(manifest, encoding="utf-8") as fh:
            return cls(json.load(fh), root=root)

    def fetch(self, url: CanonicalUrl) -> FetchResult:
        spec = self._responses.get(url.serialized)
        if spec is None:
            raise TransportError(f"no fixture response for {url.serialized}")
        if "error" in spec:
            raise TransportError(f"fixture error for {url.serialized}: {spec['error']}")
        if "body_file" in spec:
            body = (self._root / spec["body_file"]).read_text(encoding="utf-8")
        else:
            body = spec.get("body", "")
        download = None
        if spec.get("download"):
            d = spec["download"]
            download = Download(filename=d["filename"], byte_size=d["byte_size"],
                                content_hash=d["content_hash"])
        headers = tuple((k, v) for k, v in spec.get("headers", [["content-type", "text/html"]]))
        return FetchResult(status=spec.get("status", 200), headers=headers,
                           body=body, download=download)


def _snapshot_to_record(snap: Snapshot) -> dict:
    rec = {
        "id": snap.id,
        "url": snap.url.serialized,
        "fetch_time": snap.fetch_time.isoformat(),
        "http_status": snap.http_status,
        "headers": [[k, v] for k, v in snap.headers],
        "discovery": {
            "source": snap.discovery.source,
            "post_id": snap.discovery.post_id,
            "first_seen": snap.discovery.first_seen.isoformat(),
        },
        "linked_targets": [{"kind": t.kind, "href": t.href} for t in snap.linked_targets],
        "download": None if snap.download is None else {
            "filename": snap.download.filename,
            "byte_size": snap.download.byte_size,
            "content_hash": snap.download.content_hash,
        },
        "screenshot_ref": snap.screenshot_ref,
    }
    try:
        snap.body.encode("utf-8")
        rec["body"] = snap.body
    except UnicodeEncodeError:
        raw = snap.body.encode("utf-8", errors="surrogateescape")
        rec["body_b64"] = base64.b64encode(raw).decode("ascii")
    return rec


def _record_to_snapshot(rec: dict) -> Snapshot:
    if "body_b64" in rec:
        body = base64.b64decode(rec["body_b64"]).decode("utf-8", errors="surrogateescape")
    else:
        body = rec["body"]
    disc = rec["discovery"]
    download = rec.get("download")
    return Snapshot(
        id=rec["id"],
        url=canonicalize(rec["url"]),
        fetch_time=dt.datetime.fromisoformat(rec["fetch_time"]),
        http_status=rec["http_status"],
        headers=tuple((k, v) for k, v in rec["headers"]),
        body=body,
        discovery=Discovery(source=disc["source"], post_id=disc.get("post_id"),
                            first_seen=dt.datetime.fromisoformat(disc["first_seen"])),
        linked_targets=tuple(LinkedTarget(kind=t["kind"], href=t["href"])
                             for t in rec["linked_targets"]),
        download=None if download is None else Download(
            filename=download["filename"], byte_size=download["byte_size"],
            content_hash=download["content_hash"]),
        screenshot_ref=rec.get("screenshot_ref"),
    )


class SnapshotStore:
    """Single-writer append-only corpus of snapshots.

    Concurrent ingest workers must funnel through one store instance; readers
    may stream the file independently at any time.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._ids: set[str] = set()
        self.failed_fetches: list[tuple[str, str]] = []
        if self.path.exists():
            for snap in load_corpus(self.path):
                self._ids.add(snap.id)

    def __contains__(self, snap_id: str) -> bool:
        return snap_id in self._ids

    def __len__(self) -> int:
        return len(self._ids)

    def append(self, snap: Snapshot) -> bool:
        """Persist a snapshot; returns False when the id is already stored."""
        if snap.id in self._ids:
            return False
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(_snapshot_to_record(snap), ensure_ascii=False) + "\n")
        self._ids.add(snap.id)
        return True


def ingest(item: FeedItem, fetcher: Fetcher, registry: Registry,
           store: SnapshotStore,
           clock: Callable[[], dt.datetime] | None = None) -> Snapshot | None:
    """Fetch and persist one feed item, skipping URLs not hosted on an FHD.

    Returns the persisted snapshot; None when the URL is off-registry or the
    fetch failed (failures are recorded on the store, not raised).
    """
    url = canonicalize(item.url)
    if match_fhd(url, registry) is None:
        return None
    try:
        result = fetcher.fetch(url)
    except TransportError as exc:
        store.failed_fetches.append((url.serialized, str(exc)))
        log.warning("fetch failed for %s: %s", url.serialized, exc)
        return None
    fetch_time = clock() if clock is not None else dt.datetime.now(dt.timezone.utc)
    snap = Snapshot(
        id=snapshot_id(url.serialized, fetch_time, result.body),
        url=url,
        fetch_time=fetch_time,
        http_status=result.status,
        headers=result.headers,
        body=result.body,
        discovery=Discovery(source=item.source, post_id=item.post_id,
                            first_seen=item.observed_at),
        linked_targets=extract_linked_targets(result.body),
        download=result.download,
    )
    store.append(snap)
    return snap


def load_corpus(path: str | Path, lenient: bool = False) -> Iterator[Snapshot]:
    """Stream snapshots from a corpus file in file order.

    Corrupt records raise CorpusError naming the record index; with
    ``lenient=True`` they are logged and skipped instead.
    """
    with open(path, encoding="utf-8") as fh:
        for index, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                snap = _record_to_snapshot(json.loads(line))
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                if lenient:
                    log.warning("skipping corrupt corpus record %d: %s", index, exc)
                    continue
                raise CorpusError(f"corrupt record {index} in {path}: {exc}") from exc
            yield snap


def load_feed(path: str | Path) -> list[FeedItem]:
    """Read a JSONL feed of {url, source, post_id, observed_at} items."""
    items: list[FeedItem] = []
    with open(path, encoding="utf-8") as fh:
        for index, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                items.append(FeedItem(
                    url=rec["url"],
                    source=rec.get("source", "file"),
                    post_id=rec.get("post_id"),
                    observed_at=dt.datetime.fromisoformat(rec["observed_at"]),
                ))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise CorpusError(f"bad feed record {index} in {path}: {exc}") from exc
    return items
