"""Longitudinal tracking of URL status across anti-phishing entities.

An observation log is an append-only timeline of per-entity states for each
URL: blocklists report listed/not_listed, the detection aggregator reports a
count, platforms and the hosting registrar report active/removed. Coverage
and response-time statistics are pure functions over immutable log views;
polling resolution equals the scheduler interval, so response times carry an
implicit +/- interval/2 uncertainty.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .errors import ObservationLogError, TransportError
from .registry import FhdEntry
from .snapshots import FetchResult
from .stats import format_hhmm, median_timedelta

log = logging.getLogger(__name__)

BLOCKLIST_ENTITIES = ("gsb", "phishtank", "openphish", "ecrimex")
PLATFORM_ENTITIES = ("platform_twitter", "platform_facebook")
ENTITIES = BLOCKLIST_ENTITIES + ("virustotal",) + PLATFORM_ENTITIES + ("registrar",)

DEFAULT_INTERVAL_SECONDS = 600
DEFAULT_HORIZON = dt.timedelta(hours=168)
DEFAULT_CURVE_HOURS = (1, 3, 6, 12, 16, 24, 48, 96, 168)
DEFAULT_VT_THRESHOLD = 2  # the two-or-more-detections labeling convention


def _validate_state(entity: str, state):
    if entity == "virustotal":
        if not isinstance(state, int) or state < 0:
            raise ObservationLogError(
                f"virustotal state must be a non-negative detection count, got {state!r}")
    elif entity in BLOCKLIST_ENTITIES:
        if state not in ("listed", "not_listed"):
            raise ObservationLogError(f"{entity} state must be listed/not_listed")
    elif entity in PLATFORM_ENTITIES or entity == "registrar":
        if state not in ("active", "removed"):
            raise ObservationLogError(f"{entity} state must be active/removed")
    else:
        raise ObservationLogError(f"unknown entity {entity!r}")


@dataclass(frozen=True)
class ObservationEvent:
    url_id: str
    entity: str
    timestamp: dt.datetime
    state: str | int
    note: str | None = None

    def __post_init__(self):
        _validate_state(self.entity, self.state)


def _is_terminal(entity: str, state) -> bool:
    if entity in BLOCKLIST_ENTITIES:
        return state == "listed"
    if entity in PLATFORM_ENTITIES or entity == "registrar":
        return state == "removed"
    return False


class ObservationLog:
    """Append-only event log plus per-URL first_seen timestamps."""

    def __init__(self):
        self.events: list[ObservationEvent] = []
        self.first_seen: dict[str, dt.datetime] = {}
        # latest (timestamp, state) per (url, entity), for invariant checks
        self._latest: dict[tuple[str, str], tuple[dt.datetime, object]] = {}

    def register(self, url_id: str, first_seen: dt.datetime) -> None:
        existing = self.first_seen.get(url_id)
        if existing is not None and existing != first_seen:
            raise ObservationLogError(f"conflicting first_seen for {url_id}")
        self.first_seen[url_id] = first_seen

    def append(self, event: ObservationEvent, allow_revert: bool = False) -> None:
        key = (event.url_id, event.entity)
        latest = self._latest.get(key)
        if latest is not None:
            prev_ts, prev_state = latest
            if event.timestamp < prev_ts:
                raise ObservationLogError(
                    f"out-of-order event for {key}: {event.timestamp} < {prev_ts}")
            if (not allow_revert and _is_terminal(event.entity, prev_state)
                    and not _is_terminal(event.entity, event.state)):
                raise ObservationLogError(
                    f"state reverted for {key}: {prev_state!r} -> {event.state!r}")
        self.events.append(event)
        self._latest[key] = (event.timestamp, event.state)

    def events_for(self, url_id: str, entity: str) -> list[ObservationEvent]:
        found = [e for e in self.events if e.url_id == url_id and e.entity == entity]
        found.sort(key=lambda e: e.timestamp)
        return found

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for url_id, first_seen in self.first_seen.items():
                fh.write(json.dumps({"kind": "url", "url_id": url_id,
                                     "first_seen": first_seen.isoformat()}) + "\n")
            for e in self.events:
                fh.write(json.dumps({
                    "kind": "event", "url_id": e.url_id, "entity": e.entity,
                    "ts": e.timestamp.isoformat(), "state": e.state,
                    "note": e.note}) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "ObservationLog":
        out = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    if rec["kind"] == "url":
                        out.register(rec["url_id"],
                                     dt.datetime.fromisoformat(rec["first_seen"]))
                    elif rec["kind"] == "event":
                        out.append(ObservationEvent(
                            url_id=rec["url_id"], entity=rec["entity"],
                            timestamp=dt.datetime.fromisoformat(rec["ts"]),
                            state=rec["state"], note=rec.get("note")))
                    else:
                        raise ObservationLogError(f"unknown record kind {rec['kind']!r}")
                except (KeyError, ValueError) as exc:
                    raise ObservationLogError(
                        f"{path}: bad record at line {lineno}: {exc}") from exc
        return out


class EntityClient(Protocol):
    """Polls one entity for the current state of a URL."""

    entity: str

    def poll(self, url_id: str, now: dt.datetime) -> str | int: ...


class FixtureEntityClient:
    """Deterministic playback client: state transitions scripted per URL.

    ``schedule`` maps url -> [(timestamp, state), ...]; poll returns the
    latest scheduled state at or before ``now``, falling back to ``default``.
    """

    _DEFAULTS = {"virustotal": 0, "registrar": "active",
                 "platform_twitter": "active", "platform_facebook": "active"}

    def __init__(self, entity: str, schedule: dict[str, list[tuple[dt.datetime, str | int]]],
                 default: str | int | None = None):
        if entity not in ENTITIES:
            raise ObservationLogError(f"unknown entity {entity!r}")
        self.entity = entity
        self._schedule = {
            url: sorted(transitions, key=lambda p: p[0])
            for url, transitions in schedule.items()
        }
        if default is None:
            default = self._DEFAULTS.get(entity, "not_listed")
        self._default = default

    def poll(self, url_id: str, now: dt.datetime) -> str | int:
        state = self._default
        for ts, scheduled in self._schedule.get(url_id, []):
            if ts <= now:
                state = scheduled
            else:
                break
        return state


def load_fixture_clients(path: str | Path) -> dict[str, FixtureEntityClient]:
    """Read the fixture client config: {entity: {default, schedule}}."""
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    clients = {}
    for entity, spec in config.items():
        schedule = {
            url: [(dt.datetime.fromisoformat(ts), state) for ts, state in transitions]
            for url, transitions in spec.get("schedule", {}).items()
        }
        clients[entity] = FixtureEntityClient(entity, schedule,
                                              default=spec.get("default"))
    return clients


class Clock(Protocol):
    def now(self) -> dt.datetime: ...
    def sleep(self, seconds: float) -> None: ...


class SystemClock:
    def now(self) -> dt.datetime:
        return dt.datetime.now(dt.timezone.utc)

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class SimClock:
    """Test clock: sleep() advances simulated time instantly."""

    def __init__(self, start: dt.datetime):
        self._now = start

    def now(self) -> dt.datetime:
        return self._now

    def sleep(self, seconds: float) -> None:
        self._now += dt.timedelta(seconds=seconds)


def is_active(url_id: str, fetch_result: FetchResult | None,
              registry_entry: FhdEntry) -> str:
    """"removed" on 404/410, unresolvable hosts, or a takedown fingerprint
    in the body; "active" otherwise."""
    if fetch_result is None:
        return "removed"
    if fetch_result.status in (404, 410):
        return "removed"
    for fingerprint in registry_entry.takedown_fingerprints:
        if fingerprint in fetch_result.body:
            return "removed"
    return "active"


def poll_cycle(targets: list[str], clients: dict[str, EntityClient],
               clock: Clock, log_: ObservationLog,
               horizon: dt.timedelta = DEFAULT_HORIZON) -> list[ObservationEvent]:
    """One polling pass: one event per (url, entity), minus drop rules.

    URLs past the horizon are skipped for every entity; URLs the registrar
    already removed are skipped for registrar and platform entities. Client
    transport failures are logged and produce no event for that pair.
    """
    now = clock.now()
    appended: list[ObservationEvent] = []
    for url_id in targets:
        first_seen = log_.first_seen.get(url_id)
        if first_seen is None:
            raise ObservationLogError(f"target {url_id} has no first_seen registration")
        if now - first_seen > horizon:
            continue
        registrar_removed = any(
            e.state == "removed"
            for e in log_.events
            if e.url_id == url_id and e.entity == "registrar")
        for entity, client in clients.items():
            if registrar_removed and (entity == "registrar" or entity in PLATFORM_ENTITIES):
                continue
            try:
                state = client.poll(url_id, now)
            except TransportError as exc:
                log.warning("poll failed for %s/%s: %s", entity, url_id, exc)
                continue
            event = ObservationEvent(url_id=url_id, entity=entity,
                                     timestamp=now, state=state)
            log_.append(event)
            appended.append(event)
    return appended


def run_monitor(targets: list[str], clients: dict[str, EntityClient],
                log_: ObservationLog, cycles: int,
                interval_seconds: float = DEFAULT_INTERVAL_SECONDS,
                horizon: dt.timedelta = DEFAULT_HORIZON,
                clock: Clock | None = None) -> int:
    """Run a fixed number of polling cycles; returns total events appended."""
    clock = clock or SystemClock()
    total = 0
    for cycle in range(cycles):
        if cycle > 0:
            clock.sleep(interval_seconds)
        total += len(poll_cycle(targets, clients, clock, log_, horizon=horizon))
    return total


@dataclass(frozen=True)
class CoverageReport:
    entity: str
    n_urls: int
    coverage_fraction: float
    median_response: dt.timedelta | None
    curve: tuple[tuple[float, float], ...]

    @property
    def median_hhmm(self) -> str | None:
        return None if self.median_response is None else format_hhmm(self.median_response)


def _covers(entity: str, state, vt_threshold: int) -> bool:
    if entity in BLOCKLIST_ENTITIES:
        return state == "listed"
    if entity == "virustotal":
        return isinstance(state, int) and state >= vt_threshold
    return state == "removed"


def coverage(log_: ObservationLog, entity: str,
             horizon: dt.timedelta = DEFAULT_HORIZON,
             curve_hours: tuple[float, ...] = DEFAULT_CURVE_HOURS,
             vt_threshold: int = DEFAULT_VT_THRESHOLD) -> CoverageReport:
    """Coverage fraction, median response over covered URLs, and the
    cumulative coverage curve sampled at the given hour edges."""
    if entity not in ENTITIES:
        raise ObservationLogError(f"unknown entity {entity!r}")
    responses: list[dt.timedelta] = []
    total = len(log_.first_seen)
    events = sorted(
        (e for e in log_.events if e.entity == entity),
        key=lambda e: e.timestamp)
    first_cover: dict[str, dt.datetime] = {}
    for e in events:
        if e.url_id in first_cover:
            continue
        if _covers(entity, e.state, vt_threshold):
            first_cover[e.url_id] = e.timestamp
    for url_id, covered_at in first_cover.items():
        first_seen = log_.first_seen.get(url_id)
        if first_seen is None:
            continue
        gap = covered_at - first_seen
        if gap <= horizon:
            responses.append(gap)
    fraction = len(responses) / total if total else 0.0
    median = median_timedelta(responses) if responses else None

    edges = sorted(set(curve_hours) | {horizon.total_seconds() / 3600.0})
    curve = []
    for h in edges:
        if h > horizon.total_seconds() / 3600.0:
            continue
        limit = dt.timedelta(hours=h)
        frac = (sum(1 for r in responses if r <= limit) / total) if total else 0.0
        curve.append((h, frac))
    return CoverageReport(entity=entity, n_urls=total, coverage_fraction=fraction,
                          median_response=median, curve=tuple(curve))
