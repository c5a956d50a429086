import datetime as dt
import json
from pathlib import Path

import pytest

from freephish import default_config, default_registry
from freephish.features import FixtureScanner
from freephish.snapshots import (Discovery, Download, FixtureFetcher, Snapshot,
                                 extract_linked_targets, snapshot_id)

GOLDEN_DIR = Path(__file__).parent / "fixtures" / "golden"
T0 = dt.datetime(2022, 5, 1, tzinfo=dt.timezone.utc)


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session")
def golden_manifest():
    return json.loads((GOLDEN_DIR / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def golden_fetcher(golden_manifest):
    responses = {url: {"body_file": f}
                 for url, f in golden_manifest["external_fetches"].items()}
    return FixtureFetcher(responses, root=GOLDEN_DIR)


@pytest.fixture(scope="session")
def golden_scanner(golden_manifest):
    return FixtureScanner(golden_manifest["scanner_counts"])


def make_snapshot(url, body, fetch_time=T0, source="manual", post_id=None,
                  download=None, status=200, screenshot_ref=None):
    """Build an in-memory snapshot the way ingest would."""
    from freephish.registry import canonicalize

    canonical = canonicalize(url)
    if isinstance(download, dict):
        download = Download(**download)
    return Snapshot(
        id=snapshot_id(canonical.serialized, fetch_time, body),
        url=canonical,
        fetch_time=fetch_time,
        http_status=status,
        headers=(("content-type", "text/html"),),
        body=body,
        discovery=Discovery(source=source, post_id=post_id, first_seen=fetch_time),
        linked_targets=extract_linked_targets(body),
        download=download,
        screenshot_ref=screenshot_ref,
    )


def golden_snapshot(fixture: dict) -> Snapshot:
    body = (GOLDEN_DIR / fixture["body_file"]).read_text(encoding="utf-8")
    return make_snapshot(fixture["url"], body, download=fixture["download"])


# 20-fixture split used by the offline pipeline tests: labels assigned by the
# fixture's construction (separable by credential/banner/noindex/two-step
# evidence, which the forest must recover).
E2E_PHISHING = (
    "credential_form", "hidden_banner_visibility", "hidden_banner_display",
    "hidden_banner_height", "commented_banner", "noindex_meta",
    "noindex_bare_tag", "two_step_button", "link_ratio_mixed", "full_phish",
)
E2E_BENIGN = (
    "search_input_only", "visible_banner_benign", "robots_index_follow",
    "two_step_cycle", "driveby_absent", "link_ratio_zero_anchors",
    "link_ratio_all_empty", "benign_blog_control", "benign_family_blog",
    "driveby_low",
)


def golden_label(name: str) -> str | None:
    if name in E2E_PHISHING:
        return "phishing"
    if name in E2E_BENIGN:
        return "benign"
    return None


@pytest.fixture(scope="session")
def trained_model(tmp_path_factory, registry, config, golden_manifest,
                  golden_fetcher, golden_scanner):
    """Forest trained on the labeled golden fixtures, persisted to disk."""
    from freephish.features import extract_features
    from freephish.forest import ForestParams, LabeledDataset, save_forest, train_forest

    rows = []
    for fixture in golden_manifest["fixtures"]:
        label = golden_label(fixture["name"])
        if label is None:
            continue
        vec = extract_features(golden_snapshot(fixture), registry, config,
                               fetcher=golden_fetcher, scanner=golden_scanner)
        rows.append((vec, label))
    forest = train_forest(LabeledDataset(rows), ForestParams(n_trees=50, seed=42))
    path = tmp_path_factory.mktemp("model") / "model.json"
    save_forest(forest, path)
    return path, forest


def golden_fixture_fetcher_manifest(manifest: dict) -> dict:
    """FixtureFetcher manifest covering every golden page and external fetch."""
    responses = {}
    for fixture in manifest["fixtures"]:
        spec = {"body_file": fixture["body_file"]}
        if fixture["download"]:
            spec["download"] = fixture["download"]
        responses[fixture["url"]] = spec
    for url, body_file in manifest["external_fetches"].items():
        responses[url] = {"body_file": body_file}
    return responses
