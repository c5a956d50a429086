import datetime as dt
import json
import random

import pytest

from freephish.errors import CorpusError
from freephish.snapshots import (Discovery, Download, FeedItem, FixtureFetcher,
                                 LinkedTarget, Snapshot, SnapshotStore, ingest,
                                 load_corpus, load_feed, snapshot_id)

T0 = dt.datetime(2022, 5, 1, 12, 0, tzinfo=dt.timezone.utc)


def _feed_item(url, observed=T0):
    return FeedItem(url=url, source="twitter", post_id="t1", observed_at=observed)


def _fetcher(mapping):
    return FixtureFetcher({url: {"body": body} for url, body in mapping.items()})


def test_ingest_persists_fhd_snapshot(tmp_path, registry):
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    body = '<html><body><a href="/x">x</a></body></html>'
    snap = ingest(_feed_item("https://phish.weebly.com/"), _fetcher(
        {"https://phish.weebly.com/": body}), registry, store, clock=lambda: T0)
    assert snap is not None
    assert snap.url.host == "phish.weebly.com"
    assert len(store) == 1
    reloaded = list(load_corpus(store.path))
    assert reloaded[0].id == snap.id


def test_ingest_skips_non_fhd(tmp_path, registry):
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    snap = ingest(_feed_item("https://example.com/"), _fetcher(
        {"https://example.com/": "<p>x</p>"}), registry, store)
    assert snap is None
    assert len(store) == 0
    assert not store.path.exists()


def test_linked_targets_iframe_and_anchors(tmp_path, registry):
    body = ('<iframe src="https://evil.example/f"></iframe>'
            '<a href="/one">one</a><a href="https://two.example/">two</a>')
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    snap = ingest(_feed_item("https://x.weebly.com/"), _fetcher(
        {"https://x.weebly.com/": body}), registry, store, clock=lambda: T0)
    kinds = [t.kind for t in snap.linked_targets]
    assert kinds == ["iframe", "anchor", "anchor"]


def test_button_wrapped_anchor_is_button_link():
    from freephish.snapshots import extract_linked_targets

    targets = extract_linked_targets(
        '<a href="https://a.example/"><button>Go</button></a>'
        '<button onclick="window.location=\'https://b.example/x\'">Go</button>')
    assert [t.kind for t in targets] == ["button_link", "button_link"]
    assert targets[1].href == "https://b.example/x"


def test_transport_error_recorded_not_raised(tmp_path, registry):
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    fetcher = FixtureFetcher({"https://x.weebly.com/": {"error": "timeout"}})
    snap = ingest(_feed_item("https://x.weebly.com/"), fetcher, registry, store)
    assert snap is None
    assert len(store.failed_fetches) == 1
    assert "x.weebly.com" in store.failed_fetches[0][0]


def test_ingest_idempotent_for_identical_fetch(tmp_path, registry):
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    fetcher = _fetcher({"https://x.weebly.com/": "<p>same</p>"})
    first = ingest(_feed_item("https://x.weebly.com/"), fetcher, registry,
                   store, clock=lambda: T0)
    second = ingest(_feed_item("https://x.weebly.com/"), fetcher, registry,
                    store, clock=lambda: T0)
    assert first.id == second.id
    assert len(list(load_corpus(store.path))) == 1


def test_refetch_at_new_time_is_new_record(tmp_path, registry):
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    fetcher = _fetcher({"https://x.weebly.com/": "<p>same</p>"})
    ingest(_feed_item("https://x.weebly.com/"), fetcher, registry, store,
           clock=lambda: T0)
    ingest(_feed_item("https://x.weebly.com/"), fetcher, registry, store,
           clock=lambda: T0 + dt.timedelta(minutes=10))
    assert len(list(load_corpus(store.path))) == 2


def test_round_trip_ids_match(tmp_path, registry):
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    urls = [f"https://site{i}.weebly.com/" for i in range(5)]
    fetcher = _fetcher({u: f"<p>page {u}</p>" for u in urls})
    ids = [ingest(_feed_item(u), fetcher, registry, store, clock=lambda: T0).id
           for u in urls]
    assert [s.id for s in load_corpus(store.path)] == ids


def test_corrupt_record_strict_names_index(tmp_path, registry):
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    fetcher = _fetcher({"https://a.weebly.com/": "<p>a</p>"})
    ingest(_feed_item("https://a.weebly.com/"), fetcher, registry, store,
           clock=lambda: T0)
    good = store.path.read_text().splitlines()[0]
    other = good.replace(json.loads(good)["id"], "f" * 32)
    store.path.write_text(good + "\n" + '{"id": "truncated"' + "\n" + other + "\n")
    with pytest.raises(CorpusError, match="record 2"):
        list(load_corpus(store.path))
    assert len(list(load_corpus(store.path, lenient=True))) == 2


def _random_snapshot(rng: random.Random) -> Snapshot:
    from freephish.registry import canonicalize

    url = canonicalize(f"https://s{rng.randrange(10**6)}.weebly.com/p{rng.randrange(100)}")
    body = "".join(rng.choice("<>abcdef \n\"'=") for _ in range(rng.randrange(0, 200)))
    fetch_time = T0 + dt.timedelta(seconds=rng.randrange(10**6))
    download = None
    if rng.random() < 0.3:
        download = Download(filename=f"f{rng.randrange(100)}.bin",
                            byte_size=rng.randrange(10**6),
                            content_hash=f"{rng.randrange(16**8):08x}")
    targets = tuple(
        LinkedTarget(kind=rng.choice(["iframe", "button_link", "anchor"]),
                     href=f"https://t{rng.randrange(100)}.example/")
        for _ in range(rng.randrange(0, 4)))
    return Snapshot(
        id=snapshot_id(url.serialized, fetch_time, body),
        url=url, fetch_time=fetch_time,
        http_status=rng.choice([200, 404, 503]),
        headers=(("content-type", "text/html"), ("x-n", str(rng.randrange(10)))),
        body=body,
        discovery=Discovery(source=rng.choice(["twitter", "facebook", "file"]),
                            post_id=rng.choice([None, "p1"]),
                            first_seen=fetch_time - dt.timedelta(minutes=5)),
        linked_targets=targets,
        download=download,
        screenshot_ref=rng.choice([None, "shots/a.png"]),
    )


def test_persistence_round_trip_lossless(tmp_path):
    rng = random.Random(7)
    store = SnapshotStore(tmp_path / "corpus.jsonl")
    originals = []
    for _ in range(40):
        snap = _random_snapshot(rng)
        if store.append(snap):
            originals.append(snap)
    reloaded = list(load_corpus(store.path))
    assert len(reloaded) == len(originals)
    for orig, back in zip(originals, reloaded):
        assert back == orig


def test_non_utf8_body_round_trips(tmp_path):
    import dataclasses

    snap = _random_snapshot(random.Random(1))
    lossy = snap.body + b"\xff\xfe".decode("utf-8", errors="surrogateescape")
    snap = dataclasses.replace(
        snap, body=lossy,
        id=snapshot_id(snap.url.serialized, snap.fetch_time, lossy))
    store = SnapshotStore(tmp_path / "c.jsonl")
    store.append(snap)
    assert next(iter(load_corpus(store.path))).body == lossy


def test_load_feed(tmp_path):
    path = tmp_path / "feed.jsonl"
    path.write_text(json.dumps({"url": "https://a.weebly.com/", "source": "twitter",
                                "post_id": "123", "observed_at": T0.isoformat()}) + "\n")
    items = load_feed(path)
    assert items == [FeedItem(url="https://a.weebly.com/", source="twitter",
                              post_id="123", observed_at=T0)]


def test_fixture_fetcher_download_metadata(tmp_path, registry):
    fetcher = FixtureFetcher({"https://dl.weebly.com/": {
        "body": "", "download": {"filename": "x.exe", "byte_size": 10,
                                 "content_hash": "cafe"}}})
    store = SnapshotStore(tmp_path / "c.jsonl")
    snap = ingest(_feed_item("https://dl.weebly.com/"), fetcher, registry, store)
    assert snap.download == Download(filename="x.exe", byte_size=10,
                                     content_hash="cafe")
