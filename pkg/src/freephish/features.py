"""Feature extraction for FHD-hosted pages.

Ten features per snapshot: eight binaries (FHD-hosted filter, credential
fields, banner obfuscation, noindex, identified target brand, two-step
external phish link, malicious download, URL keyword) and two ratios
(external links, empty links). The vector ordering is fixed and versioned;
downstream model files refuse vectors from a different schema version.

Keyword matching is substring-based and case-insensitive throughout: phishing
slugs concatenate words ("paypallogin"), so token-boundary matching would
miss them.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Protocol
from urllib.parse import urljoin, urlsplit

from .errors import ScannerError, TransportError, UrlError
from .htmlscan import PageScan, normalize_start_tag, scan_page
from .registry import CanonicalUrl, FhdEntry, Registry, canonicalize, match_fhd
from .similarity import levenshtein
from .snapshots import Fetcher, Snapshot, extract_linked_targets

log = logging.getLogger(__name__)

FEATURE_SCHEMA_VERSION = "1"
FEATURE_NAMES = (
    "is_fhd_hosted",
    "has_credential_fields",
    "banner_obfuscated",
    "noindex_present",
    "target_identified",
    "links_external_phish",
    "malicious_download",
    "url_keyword_hit",
    "external_link_ratio",
    "empty_link_ratio",
)
_BINARY_COUNT = 8


@dataclass(frozen=True)
class FeatureVector:
    is_fhd_hosted: int
    has_credential_fields: int
    banner_obfuscated: int
    noindex_present: int
    target_identified: int
    links_external_phish: int
    malicious_download: int
    url_keyword_hit: int
    external_link_ratio: float
    empty_link_ratio: float
    target_brand: str | None = None
    schema_version: str = FEATURE_SCHEMA_VERSION

    def __post_init__(self):
        for name in FEATURE_NAMES[:_BINARY_COUNT]:
            v = getattr(self, name)
            if v not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1, got {v!r}")
        for name in FEATURE_NAMES[_BINARY_COUNT:]:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v!r}")

    def values(self) -> tuple[float, ...]:
        return tuple(float(getattr(self, name)) for name in FEATURE_NAMES)


@dataclass(frozen=True)
class Brand:
    brand_name: str
    official_domain: str


def _null_text_extractor(body: str) -> str:
    # stands in for header-image OCR; pluggable via ExtractorConfig
    return ""


@dataclass(frozen=True)
class ExtractorConfig:
    credential_keywords: tuple[str, ...]
    url_keywords: tuple[str, ...]
    brand_list: tuple[Brand, ...]
    brand_match_threshold: float = 0.25
    follow_depth: int = 1
    download_detection_threshold: int = 4
    text_extractor: Callable[[str], str] = _null_text_extractor

    def __post_init__(self):
        object.__setattr__(self, "credential_keywords",
                           _normalize_keywords(self.credential_keywords))
        object.__setattr__(self, "url_keywords",
                           _normalize_keywords(self.url_keywords))
        if self.brand_match_threshold <= 0:
            raise ValueError("brand_match_threshold must be positive")
        if self.follow_depth < 0:
            raise ValueError("follow_depth must be >= 0")
        if self.download_detection_threshold <= 0:
            raise ValueError("download_detection_threshold must be positive")


def _normalize_keywords(keywords) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for k in keywords:
        k = k.strip().lower()
        if k:
            seen.setdefault(k)
    return tuple(seen)


def _load_lines(name: str) -> list[str]:
    text = (resources.files("freephish.data") / name).read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def default_config(**overrides) -> ExtractorConfig:
    """The shipped configuration: 17 credential keywords, 30 URL keywords,
    and the curated brand list."""
    brands = []
    for line in _load_lines("brands.txt"):
        name, _, domain = line.partition("\t")
        brands.append(Brand(brand_name=name.strip(), official_domain=domain.strip()))
    cfg = ExtractorConfig(
        credential_keywords=tuple(_load_lines("credential_keywords.txt")),
        url_keywords=tuple(_load_lines("url_keywords.txt")),
        brand_list=tuple(brands),
    )
    return replace(cfg, **overrides) if overrides else cfg


def load_config(path: str | Path) -> ExtractorConfig:
    """Extractor config from a JSON file of overrides over the defaults.

    Recognized keys: credential_keywords, url_keywords, brands (list of
    [name, domain] pairs), brand_match_threshold, follow_depth,
    download_detection_threshold.
    """
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    overrides = {}
    if "credential_keywords" in raw:
        overrides["credential_keywords"] = tuple(raw["credential_keywords"])
    if "url_keywords" in raw:
        overrides["url_keywords"] = tuple(raw["url_keywords"])
    if "brands" in raw:
        overrides["brand_list"] = tuple(
            Brand(brand_name=n, official_domain=d) for n, d in raw["brands"])
    for key in ("brand_match_threshold", "follow_depth",
                "download_detection_threshold"):
        if key in raw:
            overrides[key] = raw[key]
    return default_config(**overrides)


class Scanner(Protocol):
    """Maps a download content hash to a detection count (None = unknown)."""

    def detections(self, content_hash: str) -> int | None: ...


class FixtureScanner:
    def __init__(self, counts: dict[str, int]):
        self._counts = dict(counts)

    def detections(self, content_hash: str) -> int | None:
        return self._counts.get(content_hash)


# --- individual features -----------------------------------------------

def detect_credential_fields(body: str, keywords: tuple[str, ...]) -> int:
    """1 when a form with an input exists, or any input (in or out of a
    form) carries a credential keyword in its name/id/placeholder/type or
    label text."""
    return _credential_fields_from_scan(scan_page(body), keywords)


def _credential_fields_from_scan(scan: PageScan, keywords: tuple[str, ...]) -> int:
    if scan.form_with_input:
        return 1
    for fld in scan.inputs:
        haystack = " ".join((
            fld.attrs.get("name", ""),
            fld.attrs.get("id", ""),
            fld.attrs.get("placeholder", ""),
            fld.attrs.get("type", ""),
            fld.label_text,
        )).lower()
        if any(k in haystack for k in keywords):
            return 1
    return 0


def _style_hides(style: str) -> bool:
    for decl in style.split(";"):
        prop, sep, val = decl.partition(":")
        if not sep:
            continue
        prop = prop.strip().lower()
        val = val.strip().lower().replace("!important", "").strip()
        if prop == "visibility" and val == "hidden":
            return True
        if prop == "display" and val == "none":
            return True
        if prop in ("height", "opacity"):
            v = val.removesuffix("px").removesuffix("%").strip()
            try:
                if float(v) == 0.0:
                    return True
            except ValueError:
                pass
    return False


def detect_banner_obfuscation(body: str, registry_entry: FhdEntry) -> int:
    """1 when the FHD's banner element is hidden (visibility:hidden,
    display:none, height:0, opacity:0 — inline or via a style block) or the
    banner markup survives only inside an HTML comment."""
    return _banner_from_scan(scan_page(body), registry_entry)


def _banner_from_scan(scan: PageScan, registry_entry: FhdEntry) -> int:
    markers = [m.lower() for m in registry_entry.banner_markers]
    if not markers:
        return 0
    for name, attrs in scan.tags:
        tag_str = normalize_start_tag(name, attrs)
        if any(m in tag_str for m in markers):
            style = next((v for k, v in attrs if k == "style" and v), None)
            if style and _style_hides(style):
                return 1
    for rule in scan.style_text.split("}"):
        selector, sep, decls = rule.partition("{")
        if sep and any(m in selector.lower() for m in markers) and _style_hides(decls):
            return 1
    for comment in scan.comments:
        lowered = comment.lower()
        if any(m in lowered for m in markers):
            return 1
    return 0


def detect_noindex(body: str) -> int:
    """1 for a robots meta tag carrying the noindex token, or a bare
    <noindex> tag."""
    return _noindex_from_scan(scan_page(body))


def _noindex_from_scan(scan: PageScan) -> int:
    if scan.noindex_tag:
        return 1
    for meta in scan.metas:
        if meta.get("name", "").lower() != "robots":
            continue
        tokens = re.split(r"[,\s]+", meta.get("content", "").lower())
        if "noindex" in tokens:
            return 1
    return 0


def _url_text(url: CanonicalUrl, slug: str | None) -> str:
    text = (slug if slug is not None else url.host) + " " + url.path
    return text.lower()


def _domain_label(domain: str) -> str:
    return domain.split(".", 1)[0]


def identify_target(url: CanonicalUrl, body: str, config: ExtractorConfig,
                    slug: str | None = None) -> str | None:
    """Best-matching targeted brand for a URL, or None.

    Each slug/path token is compared against every brand name and official
    domain label with normalized edit distance LV/max(len); a brand also
    qualifies when its name (length >= 4) is contained in the slug/path
    string. Ties break on lower distance, then brand name. When the URL
    yields nothing, text from the pluggable extractor (header-image OCR
    stand-in, empty by default) is matched the same way.
    """
    text = _url_text(url, slug)
    found = _match_brands(text, config)
    if found is not None:
        return found
    extracted = config.text_extractor(body)
    if extracted:
        return _match_brands(extracted.lower(), config)
    return None


def _match_brands(text: str, config: ExtractorConfig) -> str | None:
    tokens = [t for t in re.split(r"[^a-z0-9]+", text) if t]
    compact = text
    best: tuple[float, str] | None = None
    for brand in config.brand_list:
        names = {brand.brand_name.lower(), _domain_label(brand.official_domain.lower())}
        dist = min(
            (levenshtein(tok, name) / max(len(tok), len(name))
             for tok in tokens for name in names),
            default=1.0,
        )
        contained = len(brand.brand_name) >= 4 and brand.brand_name.lower() in compact
        if dist <= config.brand_match_threshold or contained:
            key = (dist, brand.brand_name)
            if best is None or key < best:
                best = key
    return best[1] if best else None


def url_keyword_hit(url: CanonicalUrl, config: ExtractorConfig,
                    slug: str | None = None) -> int:
    """1 when any configured keyword occurs as a substring of the lowercase
    slug+path+query."""
    text = (slug if slug is not None else url.host) + url.path
    if url.query:
        text += "?" + url.query
    text = text.lower()
    return int(any(k in text for k in config.url_keywords))


_MULTIPART_SUFFIXES = {
    ("co", "uk"), ("org", "uk"), ("ac", "uk"), ("gov", "uk"),
    ("com", "au"), ("net", "au"), ("org", "au"), ("co", "jp"),
    ("com", "br"), ("co", "in"),
}


def registrable_domain(host: str) -> str:
    """Naive eTLD+1: last two labels, with a small multi-part suffix table."""
    labels = [l for l in host.lower().strip(".").split(".") if l]
    if len(labels) <= 2:
        return ".".join(labels)
    if (labels[-2], labels[-1]) in _MULTIPART_SUFFIXES and len(labels) >= 3:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:])


def link_ratios(body: str, page_host: str,
                base_domain: str | None = None) -> tuple[float, float]:
    """(external_link_ratio, empty_link_ratio) over all anchor tags.

    External: href resolving to a registrable domain different from the
    page's FHD base domain. Empty: missing href, fragment-only, or a
    javascript pseudo-link. Pages without anchors score (0, 0).
    """
    return _link_ratios_from_scan(scan_page(body), page_host, base_domain)


def _link_ratios_from_scan(scan: PageScan, page_host: str,
                           base_domain: str | None = None) -> tuple[float, float]:
    anchors = scan.anchors
    if not anchors:
        return 0.0, 0.0
    base = registrable_domain(base_domain or page_host)
    external = empty = 0
    for anchor in anchors:
        href = (anchor.href or "").strip()
        if not href or href.startswith("#") or href.lower().startswith("javascript:"):
            empty += 1
            continue
        host = urlsplit(href).hostname
        if host and registrable_domain(host) != base:
            external += 1
    total = len(anchors)
    return external / total, empty / total


def detect_malicious_download(snapshot: Snapshot, scanner: Scanner | None,
                              config: ExtractorConfig) -> int:
    """1 when the snapshot carries a download whose scan count reaches the
    detection threshold; unknown hashes and scanner failures count 0."""
    if snapshot.download is None or scanner is None:
        return 0
    try:
        count = scanner.detections(snapshot.download.content_hash)
    except ScannerError as exc:
        log.warning("scanner failed for %s: %s", snapshot.download.content_hash, exc)
        return 0
    if count is None:
        return 0
    return int(count >= config.download_detection_threshold)


def detect_external_phish_link(snapshot: Snapshot, fetcher: Fetcher | None,
                               registry: Registry, config: ExtractorConfig) -> int:
    """Two-step phish check: when the page itself has no credential fields,
    follow its iframe/button targets up to follow_depth and report 1 if any
    fetched page asks for credentials and either targets a brand or is
    FHD-hosted. Fetch failures contribute 0; revisits are suppressed."""
    if _credential_fields_from_scan(scan_page(snapshot.body), config.credential_keywords):
        return 0
    if fetcher is None or config.follow_depth < 1:
        return 0
    visited = {snapshot.url.serialized}
    return _follow(snapshot.url, snapshot.linked_targets, 1, visited,
                   fetcher, registry, config)


def _follow(base_url: CanonicalUrl, targets, depth: int, visited: set[str],
            fetcher: Fetcher, registry: Registry, config: ExtractorConfig) -> int:
    for target in targets:
        if target.kind not in ("iframe", "button_link"):
            continue
        try:
            resolved = canonicalize(urljoin(base_url.serialized, target.href))
        except UrlError:
            continue
        if resolved.serialized in visited:
            continue
        visited.add(resolved.serialized)
        try:
            result = fetcher.fetch(resolved)
        except TransportError as exc:
            log.warning("two-step follow failed for %s: %s", resolved.serialized, exc)
            continue
        scan = scan_page(result.body)
        if _credential_fields_from_scan(scan, config.credential_keywords):
            m = match_fhd(resolved, registry)
            slug = m.site_slug if m else None
            if m is not None or identify_target(resolved, result.body, config,
                                                slug=slug) is not None:
                return 1
        elif depth < config.follow_depth:
            if _follow(resolved, extract_linked_targets(result.body), depth + 1,
                       visited, fetcher, registry, config):
                return 1
    return 0


def extract_features(snapshot: Snapshot, registry: Registry,
                     config: ExtractorConfig | None = None,
                     fetcher: Fetcher | None = None,
                     scanner: Scanner | None = None) -> FeatureVector:
    """Compose the full feature vector for one snapshot.

    Pure given fixed fetcher/scanner responses: repeated calls yield
    identical vectors.
    """
    config = config or default_config()
    m = match_fhd(snapshot.url, registry)
    slug = m.site_slug if m else None
    scan = scan_page(snapshot.body)

    creds = _credential_fields_from_scan(scan, config.credential_keywords)
    brand = identify_target(snapshot.url, snapshot.body, config, slug=slug)
    external_phish = 0
    if creds == 0:
        external_phish = detect_external_phish_link(snapshot, fetcher, registry, config)
    ratios = _link_ratios_from_scan(scan, snapshot.url.host,
                                    m.entry.base_domain if m else None)
    return FeatureVector(
        is_fhd_hosted=int(m is not None),
        has_credential_fields=creds,
        banner_obfuscated=_banner_from_scan(scan, m.entry) if m else 0,
        noindex_present=_noindex_from_scan(scan),
        target_identified=int(brand is not None),
        links_external_phish=external_phish,
        malicious_download=detect_malicious_download(snapshot, scanner, config),
        url_keyword_hit=url_keyword_hit(snapshot.url, config, slug=slug),
        external_link_ratio=ratios[0],
        empty_link_ratio=ratios[1],
        target_brand=brand,
    )
