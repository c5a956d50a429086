"""From a URL feed to feature vectors.

Ingestion filters the feed down to FHD-hosted URLs, stores one snapshot per
fetch, and the extractor turns each snapshot into the 10-feature vector the
classifier consumes. Everything here runs against canned responses.
"""

import datetime as dt
import tempfile
from pathlib import Path

from freephish import default_config, default_registry, extract_features
from freephish.features import FEATURE_NAMES
from freephish.snapshots import FeedItem, FixtureFetcher, SnapshotStore, ingest

NOW = dt.datetime(2022, 5, 1, tzinfo=dt.timezone.utc)

PHISH_PAGE = """
<html><head><meta name="robots" content="noindex"></head><body>
<form action="/steal"><input type="text" name="username">
<input type="password" name="password"></form>
<a href="https://www.paypal.com/help">Help</a><a href="#">Terms</a>
<div class="weebly-footer" style="visibility: hidden">Powered by Weebly</div>
</body></html>
"""
BENIGN_PAGE = '<html><body><h1>Sourdough notes</h1><a href="/starter">My starter</a></body></html>'

fetcher = FixtureFetcher({
    "https://paypal-login.weebly.com/": {"body": PHISH_PAGE},
    "https://blog-recipes.weebly.com/": {"body": BENIGN_PAGE},
})

registry = default_registry()
config = default_config()

with tempfile.TemporaryDirectory() as tmp:
    store = SnapshotStore(Path(tmp) / "corpus.jsonl")
    feed = [
        FeedItem(url="https://paypal-login.weebly.com/", source="twitter",
                 post_id="t1", observed_at=NOW),
        FeedItem(url="https://blog-recipes.weebly.com/", source="twitter",
                 post_id="t2", observed_at=NOW),
        FeedItem(url="https://example.com/not-fhd", source="twitter",
                 post_id="t3", observed_at=NOW),  # filtered out
    ]
    snapshots = [snap for item in feed
                 if (snap := ingest(item, fetcher, registry, store,
                                    clock=lambda: NOW))]
    print(f"ingested {len(snapshots)} of {len(feed)} feed items "
          f"(non-FHD URLs are skipped)\n")

    for snap in snapshots:
        vector = extract_features(snap, registry, config)
        print(snap.url.serialized)
        for name in FEATURE_NAMES:
            print(f"  {name:<22} {getattr(vector, name)}")
        if vector.target_brand:
            print(f"  targeted brand: {vector.target_brand}")
        print()
