"""Free web-hosting domain (FHD) registry and URL matching.

The registry is the canonical knowledge base of hosting services whose free
sites live either as subdomains of the service's own domain
(``paypal-login.weebly.com``) or as paths under a fixed host
(``sites.google.com/view/...``). URLs are canonicalized once and then matched
against the registry; everything downstream (ingestion, features, monitoring,
reporting) works with these canonical forms.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from urllib.parse import urlsplit

from .errors import RegistryError, UrlError

SUBDOMAIN_PREFIX = "subdomain_prefix"
PATH_SUFFIX = "path_suffix"
_SCHEMES = (SUBDOMAIN_PREFIX, PATH_SUFFIX)

_ENTRY_FIELDS = {
    "name",
    "base_domain",
    "subdomain_scheme",
    "tld",
    "has_template_builder",
    "abuse_contact",
    "registrar",
    "domain_created",
    "takedown_fingerprints",
    "banner_markers",
}
_REQUIRED_FIELDS = {"name", "base_domain", "subdomain_scheme", "tld",
                    "has_template_builder", "takedown_fingerprints"}


@dataclass(frozen=True)
class FhdEntry:
    """One free web-hosting service.

    ``banner_markers`` are class/id fragments of the service's free-tier
    banner element; services that inject no banner carry an empty list.
    ``takedown_fingerprints`` are body substrings of the service's
    "site removed" page.
    """

    name: str
    base_domain: str
    subdomain_scheme: str
    tld: str
    has_template_builder: bool
    takedown_fingerprints: tuple[str, ...]
    abuse_contact: str | None = None
    registrar: str | None = None
    domain_created: dt.date | None = None
    banner_markers: tuple[str, ...] = ()

    def __post_init__(self):
        base = self.base_domain
        if base != base.lower():
            raise RegistryError(f"base_domain must be lowercase: {base!r}")
        if "." not in base or "/" in base or "://" in base:
            raise RegistryError(f"base_domain must be a bare registrable domain: {base!r}")
        if self.subdomain_scheme not in _SCHEMES:
            raise RegistryError(f"unknown subdomain_scheme {self.subdomain_scheme!r}")


@dataclass(frozen=True)
class CanonicalUrl:
    """A URL reduced to a stable, comparable form (no fragment, lowercase host)."""

    scheme: str
    host: str
    path: str
    original: str
    port: int | None = None
    query: str | None = None

    @property
    def serialized(self) -> str:
        netloc = self.host if self.port is None else f"{self.host}:{self.port}"
        out = f"{self.scheme}://{netloc}{self.path}"
        if self.query is not None:
            out += f"?{self.query}"
        return out

    def __str__(self) -> str:
        return self.serialized


@dataclass(frozen=True)
class FhdMatch:
    """A URL recognized as a free site on a registry entry."""

    entry: FhdEntry
    site_slug: str


class Registry:
    """Immutable collection of FhdEntry rows, indexed for matching."""

    def __init__(self, entries: list[FhdEntry]):
        if not entries:
            raise RegistryError("registry must contain at least one entry")
        names: set[str] = set()
        bases: set[str] = set()
        for e in entries:
            if e.name in names:
                raise RegistryError(f"duplicate entry name: {e.name!r}")
            if e.base_domain in bases:
                raise RegistryError(f"duplicate base_domain: {e.base_domain!r}")
            names.add(e.name)
            bases.add(e.base_domain)
        # Pairwise disjointness: no base_domain may equal or dot-suffix another,
        # otherwise one URL could match two entries.
        base_list = sorted(bases)
        for a in base_list:
            for b in base_list:
                if a != b and a.endswith("." + b):
                    raise RegistryError(
                        f"overlapping base_domains: {a!r} is a subdomain of {b!r}")
        self._entries = tuple(entries)
        self._by_name = {e.name: e for e in entries}

    @property
    def entries(self) -> tuple[FhdEntry, ...]:
        return self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def get(self, name: str) -> FhdEntry | None:
        return self._by_name.get(name)

    def base_domains(self) -> list[str]:
        return [e.base_domain for e in self._entries]


def _parse_entry(obj: dict, lineno: int) -> FhdEntry:
    if not isinstance(obj, dict):
        raise RegistryError(f"line {lineno}: entry is not an object")
    unknown = set(obj) - _ENTRY_FIELDS
    if unknown:
        raise RegistryError(f"line {lineno}: unknown field(s) {sorted(unknown)}")
    missing = _REQUIRED_FIELDS - set(obj)
    if missing:
        raise RegistryError(f"line {lineno}: missing field(s) {sorted(missing)}")
    created = obj.get("domain_created")
    if created is not None:
        try:
            created = dt.date.fromisoformat(created)
        except ValueError as exc:
            raise RegistryError(f"line {lineno}: bad domain_created: {exc}") from exc
    fingerprints = obj["takedown_fingerprints"]
    if not isinstance(fingerprints, list) or not all(isinstance(s, str) for s in fingerprints):
        raise RegistryError(f"line {lineno}: takedown_fingerprints must be a list of strings")
    markers = obj.get("banner_markers", [])
    try:
        return FhdEntry(
            name=obj["name"],
            base_domain=obj["base_domain"],
            subdomain_scheme=obj["subdomain_scheme"],
            tld=obj["tld"],
            has_template_builder=bool(obj["has_template_builder"]),
            takedown_fingerprints=tuple(fingerprints),
            abuse_contact=obj.get("abuse_contact"),
            registrar=obj.get("registrar"),
            domain_created=created,
            banner_markers=tuple(markers),
        )
    except RegistryError as exc:
        raise RegistryError(f"line {lineno}: {exc}") from exc


def load_registry(path: str | Path) -> Registry:
    """Load a registry from a JSONL file (one FhdEntry object per line).

    Unknown keys, duplicate names/base_domains and empty files are rejected.
    """
    entries: list[FhdEntry] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RegistryError(f"line {lineno}: invalid JSON: {exc}") from exc
            entries.append(_parse_entry(obj, lineno))
    return Registry(entries)


def default_registry() -> Registry:
    """The shipped 24-FHD registry."""
    with resources.as_file(resources.files("freephish.data") / "registry.jsonl") as p:
        return load_registry(p)


def default_registry_path() -> Path:
    return Path(str(resources.files("freephish.data") / "registry.jsonl"))


def canonicalize(raw: str) -> CanonicalUrl:
    """Normalize a raw URL string: lowercase host, drop the fragment.

    Scheme-less inputs are retried as http:// URLs but only accepted when the
    host contains a dot, so bare words stay unparseable. Canonicalization is
    idempotent: canonicalizing a serialized CanonicalUrl is a no-op.
    """
    if not raw or not raw.strip():
        raise UrlError("empty URL")
    raw = raw.strip()
    parts = urlsplit(raw)
    if not parts.netloc:
        if parts.scheme and parts.scheme not in ("http", "https"):
            raise UrlError(f"unsupported scheme in {raw!r}")
        parts = urlsplit("http://" + raw)
        if not parts.netloc or "." not in parts.netloc:
            raise UrlError(f"no host in {raw!r}")
    try:
        host = parts.hostname
        port = parts.port
    except ValueError as exc:
        raise UrlError(f"bad netloc in {raw!r}: {exc}") from exc
    if not host:
        raise UrlError(f"no host in {raw!r}")
    return CanonicalUrl(
        scheme=(parts.scheme or "http").lower(),
        host=host.lower(),
        port=port,
        path=parts.path,
        query=parts.query if parts.query else None,
        original=raw,
    )


def match_fhd(url: CanonicalUrl, registry: Registry) -> FhdMatch | None:
    """Match a canonical URL against the registry.

    subdomain_prefix entries match hosts of the form ``<slug>.<base_domain>``;
    path_suffix entries match ``<base_domain>/<slug...>``. A bare host with no
    slug, or a slug of just "www", is not a match.
    """
    for entry in registry:
        if entry.subdomain_scheme == SUBDOMAIN_PREFIX:
            suffix = "." + entry.base_domain
            if url.host.endswith(suffix):
                slug = url.host[: -len(suffix)]
                if slug and slug != "www":
                    return FhdMatch(entry=entry, site_slug=slug)
        else:
            if url.host == entry.base_domain:
                slug = url.path.strip("/")
                if slug and slug != "www":
                    return FhdMatch(entry=entry, site_slug=slug)
    return None
