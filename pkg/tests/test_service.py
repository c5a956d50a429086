import json
import urllib.error
import urllib.request

import pytest

from conftest import GOLDEN_DIR, golden_fixture_fetcher_manifest
from freephish.registry import default_registry_path
from freephish.service import ClassifierService, ServiceConfig, VerdictCache
from freephish.snapshots import FixtureFetcher


@pytest.fixture(scope="module")
def service(trained_model, golden_manifest):
    model_path, _ = trained_model
    fetcher = FixtureFetcher(golden_fixture_fetcher_manifest(golden_manifest),
                             root=GOLDEN_DIR)
    svc = ClassifierService(ServiceConfig(
        model_path=model_path, registry_path=default_registry_path(),
        port=0, fetcher=fetcher))
    port = svc.start()
    yield svc, port
    svc.stop()


def _post(port, payload, path="/classify"):
    req = urllib.request.Request(
        f"http://127.0.0.1:{port}{path}",
        data=json.dumps(payload).encode(), method="POST",
        headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req, timeout=10) as resp:
        return resp.status, json.loads(resp.read())


def _get(port, path):
    with urllib.request.urlopen(f"http://127.0.0.1:{port}{path}", timeout=10) as resp:
        return resp.status, json.loads(resp.read())


def test_classify_known_phishing_fixture(service):
    svc, port = service
    status, payload = _post(port, {"url": "https://paypal-login.weebly.com/"})
    assert status == 200
    assert payload["is_fhd"] is True
    assert payload["fhd_name"] == "Weebly"
    assert payload["verdict"]["label"] == "phishing"
    assert payload["verdict"]["score"] >= 0.5


def test_classify_with_inline_html(service):
    svc, port = service
    html = (GOLDEN_DIR / "full_phish.html").read_text()
    status, payload = _post(port, {"url": "https://paypal-login.weebly.com/",
                                   "html": html})
    assert status == 200
    assert payload["verdict"]["label"] == "phishing"


def test_non_fhd_url_shortcuts_to_benign(service):
    svc, port = service
    status, payload = _post(port, {"url": "https://www.example.com/login"})
    assert status == 200
    assert payload["is_fhd"] is False
    assert payload["verdict"] == {"label": "benign", "score": 0.0}


def test_health_reports_model_version(service, trained_model):
    svc, port = service
    _, forest = trained_model
    status, payload = _get(port, "/health")
    assert status == 200
    assert payload["model_version"] == forest.model_version
    assert payload["registry_size"] == 24


def test_registry_endpoint_lists_base_domains(service):
    svc, port = service
    status, payload = _get(port, "/registry")
    assert status == 200
    assert len(payload["base_domains"]) == 24
    assert "weebly.com" in payload["base_domains"]


def test_malformed_body_is_400(service):
    svc, port = service
    req = urllib.request.Request(f"http://127.0.0.1:{port}/classify",
                                 data=b"{not json", method="POST")
    with pytest.raises(urllib.error.HTTPError) as err:
        urllib.request.urlopen(req, timeout=10)
    assert err.value.code == 400


def test_missing_url_is_400(service):
    svc, port = service
    with pytest.raises(urllib.error.HTTPError) as err:
        _post(port, {"html": "<p>x</p>"})
    assert err.value.code == 400


def test_unknown_path_is_404(service):
    svc, port = service
    with pytest.raises(urllib.error.HTTPError) as err:
        _get(port, "/nope")
    assert err.value.code == 404


def test_unfetchable_fhd_url_yields_unknown(service):
    svc, port = service
    status, payload = _post(port, {"url": "https://never-fixtured.weebly.com/"})
    assert status == 200
    assert payload["verdict"]["label"] == "unknown"
    assert payload["note"] == "unfetched"


def test_unloaded_model_is_503(tmp_path, golden_manifest):
    svc = ClassifierService(ServiceConfig(
        model_path=tmp_path / "missing-model.json",
        registry_path=default_registry_path(), port=0))
    port = svc.start()
    try:
        with pytest.raises(urllib.error.HTTPError) as err:
            _post(port, {"url": "https://x.weebly.com/"})
        assert err.value.code == 503
        status, payload = _get(port, "/health")
        assert payload["status"] == "model_unloaded"
    finally:
        svc.stop()


def test_repeated_classify_identical_apart_from_cache_flag(service):
    svc, port = service
    _, first = _post(port, {"url": "https://chase-online.wixsite.com/"})
    _, second = _post(port, {"url": "https://chase-online.wixsite.com/"})
    assert second.pop("cache") is True
    first.pop("cache")
    assert first == second


def test_cache_respects_ttl(trained_model, golden_manifest):
    model_path, _ = trained_model
    fake_time = [0.0]
    fetch_count = [0]

    class CountingFetcher(FixtureFetcher):
        def fetch(self, url):
            fetch_count[0] += 1
            return super().fetch(url)

    fetcher = CountingFetcher(golden_fixture_fetcher_manifest(golden_manifest),
                              root=GOLDEN_DIR)
    svc = ClassifierService(ServiceConfig(
        model_path=model_path, registry_path=default_registry_path(),
        cache_ttl=900.0, fetcher=fetcher, cache_clock=lambda: fake_time[0]))
    url = "https://garden-diary.weebly.com/"
    assert svc.classify(url)["cache"] is False
    assert fetch_count[0] == 1
    fake_time[0] = 800.0
    assert svc.classify(url)["cache"] is True
    assert fetch_count[0] == 1
    fake_time[0] = 1000.0  # past the 900s TTL
    assert svc.classify(url)["cache"] is False
    assert fetch_count[0] == 2


def test_verdict_cache_unit():
    fake_time = [0.0]
    cache = VerdictCache(ttl=10.0, clock=lambda: fake_time[0])
    cache.put("k", {"a": 1})
    assert cache.get("k") == {"a": 1}
    fake_time[0] = 10.5
    assert cache.get("k") is None
