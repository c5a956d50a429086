"""Synthetic labeled feature corpora for training experiments and tests.

Rows are drawn from documented per-label feature marginals that mirror the
extraction semantics: phishing pages usually ask for credentials, often hide
the host banner, suppress indexing, name a target brand and use bait words in
the slug; two-step pages link out only when no credential field is present.
Benign free-tier pages rarely do any of that. All rows are FHD-hosted (the
corpus is produced downstream of the registry filter).
"""

from __future__ import annotations

import random

from .features import FeatureVector
from .forest import LabeledDataset

# P(feature = 1 | label), plus uniform ranges for the two ratios
PHISHING_MARGINALS = {
    "has_credential_fields": 0.85,
    "banner_obfuscated": 0.55,
    "noindex_present": 0.45,
    "target_identified": 0.75,
    "links_external_phish_given_no_creds": 0.60,
    "malicious_download": 0.08,
    "url_keyword_hit": 0.80,
    "external_link_ratio": (0.30, 0.90),
    "empty_link_ratio": (0.20, 0.80),
}
BENIGN_MARGINALS = {
    "has_credential_fields": 0.05,
    "banner_obfuscated": 0.01,
    "noindex_present": 0.05,
    "target_identified": 0.01,
    "links_external_phish_given_no_creds": 0.0,
    "malicious_download": 0.005,
    "url_keyword_hit": 0.08,
    "external_link_ratio": (0.0, 0.40),
    "empty_link_ratio": (0.0, 0.30),
}


def _draw_row(marginals: dict, rng: random.Random) -> FeatureVector:
    creds = int(rng.random() < marginals["has_credential_fields"])
    external_phish = 0
    if creds == 0:
        external_phish = int(
            rng.random() < marginals["links_external_phish_given_no_creds"])
    lo, hi = marginals["external_link_ratio"]
    external_ratio = rng.uniform(lo, hi)
    lo, hi = marginals["empty_link_ratio"]
    empty_ratio = rng.uniform(lo, hi)
    return FeatureVector(
        is_fhd_hosted=1,
        has_credential_fields=creds,
        banner_obfuscated=int(rng.random() < marginals["banner_obfuscated"]),
        noindex_present=int(rng.random() < marginals["noindex_present"]),
        target_identified=int(rng.random() < marginals["target_identified"]),
        links_external_phish=external_phish,
        malicious_download=int(rng.random() < marginals["malicious_download"]),
        url_keyword_hit=int(rng.random() < marginals["url_keyword_hit"]),
        external_link_ratio=external_ratio,
        empty_link_ratio=empty_ratio,
    )


def make_synthetic_dataset(n_rows: int, seed: int = 0) -> LabeledDataset:
    """Balanced corpus of n_rows drawn from the documented marginals."""
    rng = random.Random(seed)
    rows = []
    for i in range(n_rows):
        if i % 2 == 0:
            rows.append((_draw_row(PHISHING_MARGINALS, rng), "phishing"))
        else:
            rows.append((_draw_row(BENIGN_MARGINALS, rng), "benign"))
    return LabeledDataset(rows)
