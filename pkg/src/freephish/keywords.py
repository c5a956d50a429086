"""Corpus keyword derivation.

Re-derives URL keyword lists from a snapshot corpus by token frequency, the
same way the shipped 30-keyword default was conceived: tokenize each URL's
slug and path, count occurrences, keep the top k.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Iterable

from .registry import Registry, match_fhd
from .snapshots import Snapshot

_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize_url_text(text: str) -> list[str]:
    """Lowercase alphanumeric tokens, at least 2 chars, digits-only dropped."""
    tokens = _TOKEN.findall(text.lower())
    return [t for t in tokens if len(t) >= 2 and not t.isdigit()]


def derive_keywords(snapshots: Iterable[Snapshot], top_k: int,
                    registry: Registry) -> list[tuple[str, int]]:
    """Top-k (token, count) pairs over the corpus URLs' slug+path text.

    Ordered by descending count, then token, so results are deterministic.
    """
    counts: Counter[str] = Counter()
    for snap in snapshots:
        m = match_fhd(snap.url, registry)
        slug = m.site_slug if m else snap.url.host
        counts.update(tokenize_url_text(f"{slug} {snap.url.path}"))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_k]
