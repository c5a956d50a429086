import random

import pytest

from freephish.errors import RegistryError, UrlError
from freephish.registry import (SUBDOMAIN_PREFIX, Registry, canonicalize,
                                load_registry, match_fhd)

EXPECTED_NAMES = {
    "Weebly", "DuckDNS", "000webhost", "Blogspot", "Wix", "Google Sites",
    "Github.io", "Firebase", "Square up", "Zoho Forms", "Wordpress",
    "Google Forms", "Sharepoint", "Yolasite", "MyFTP.org", "GoDaddysites",
    "Mailchimp", "Atwebpages", "glitch.me", "Webnode", "hPage", "Herokuapp",
    "website.com", "Netlify",
}


def test_default_registry_has_24_expected_entries(registry):
    assert len(registry) == 24
    assert {e.name for e in registry} == EXPECTED_NAMES


def test_default_registry_fingerprints_nonempty(registry):
    for entry in registry:
        assert entry.takedown_fingerprints, entry.name


def test_load_rejects_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    with pytest.raises(RegistryError):
        load_registry(path)


def test_load_rejects_duplicate_base_domain(tmp_path):
    entry = ('{"name": "%s", "base_domain": "weebly.com", '
             '"subdomain_scheme": "subdomain_prefix", "tld": "com", '
             '"has_template_builder": true, "takedown_fingerprints": ["gone"]}')
    path = tmp_path / "dup.jsonl"
    path.write_text((entry % "A") + "\n" + (entry % "B") + "\n")
    with pytest.raises(RegistryError, match="duplicate base_domain"):
        load_registry(path)


def test_load_rejects_duplicate_name(tmp_path):
    entry = ('{"name": "Same", "base_domain": "%s", '
             '"subdomain_scheme": "subdomain_prefix", "tld": "com", '
             '"has_template_builder": true, "takedown_fingerprints": ["gone"]}')
    path = tmp_path / "dup.jsonl"
    path.write_text((entry % "a.com") + "\n" + (entry % "b.com") + "\n")
    with pytest.raises(RegistryError, match="duplicate entry name"):
        load_registry(path)


def test_load_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"name": "A", "base_domain": "a.com", '
                    '"subdomain_scheme": "subdomain_prefix", "tld": "com", '
                    '"has_template_builder": true, '
                    '"takedown_fingerprints": ["x"], "bogus": 1}\n')
    with pytest.raises(RegistryError, match="unknown field"):
        load_registry(path)


def test_load_reports_line_number_on_bad_json(tmp_path):
    good = ('{"name": "A", "base_domain": "a.com", '
            '"subdomain_scheme": "subdomain_prefix", "tld": "com", '
            '"has_template_builder": true, "takedown_fingerprints": ["x"]}')
    path = tmp_path / "parse.jsonl"
    path.write_text(good + "\n{not json\n")
    with pytest.raises(RegistryError, match="line 2"):
        load_registry(path)


def test_overlapping_base_domains_rejected():
    from freephish.registry import FhdEntry

    a = FhdEntry(name="A", base_domain="weebly.com",
                 subdomain_scheme=SUBDOMAIN_PREFIX, tld="com",
                 has_template_builder=True, takedown_fingerprints=("x",))
    b = FhdEntry(name="B", base_domain="foo.weebly.com",
                 subdomain_scheme=SUBDOMAIN_PREFIX, tld="com",
                 has_template_builder=True, takedown_fingerprints=("x",))
    with pytest.raises(RegistryError, match="overlapping"):
        Registry([a, b])


# --- canonicalize ---------------------------------------------------------

def test_canonicalize_lowercases_host_and_strips_fragment():
    url = canonicalize("HTTPS://Foo.Weebly.COM/a#frag")
    assert url.host == "foo.weebly.com"
    assert url.path == "/a"
    assert url.scheme == "https"
    assert "#" not in url.serialized


def test_canonicalize_rejects_bare_word():
    with pytest.raises(UrlError):
        canonicalize("notaurl")


def test_canonicalize_preserves_query():
    url = canonicalize("http://a.b.duckdns.org/x?q=1")
    assert url.query == "q=1"
    assert url.serialized == "http://a.b.duckdns.org/x?q=1"


def test_canonicalize_rejects_empty():
    with pytest.raises(UrlError):
        canonicalize("")


def test_canonicalize_accepts_schemeless_host():
    url = canonicalize("foo.weebly.com/page")
    assert url.scheme == "http"
    assert url.host == "foo.weebly.com"


def test_canonicalize_keeps_port():
    url = canonicalize("http://foo.weebly.com:8080/a")
    assert url.port == 8080
    assert url.serialized == "http://foo.weebly.com:8080/a"


def _random_url(rng):
    scheme = rng.choice(["http", "https", ""])
    labels = [rng.choice(["Foo", "bar", "BAZ", "a1", "x-y"])
              for _ in range(rng.randint(1, 3))]
    host = ".".join(labels) + rng.choice([".weebly.com", ".example.org", ".duckdns.org"])
    path = rng.choice(["", "/", "/A/b", "/login"])
    query = rng.choice(["", "?q=1&B=2"])
    frag = rng.choice(["", "#Frag"])
    prefix = f"{scheme}://" if scheme else ""
    return f"{prefix}{host}{path}{query}{frag}"


def test_canonicalize_idempotent_over_random_urls():
    rng = random.Random(20220501)
    for _ in range(200):
        raw = _random_url(rng)
        first = canonicalize(raw)
        second = canonicalize(first.serialized)
        assert second.serialized == first.serialized


# --- match_fhd ------------------------------------------------------------

def test_match_subdomain_slug(registry):
    match = match_fhd(canonicalize("https://paypal-login.weebly.com/"), registry)
    assert match is not None
    assert match.entry.name == "Weebly"
    assert match.site_slug == "paypal-login"


def test_bare_host_is_no_match(registry):
    assert match_fhd(canonicalize("https://weebly.com/"), registry) is None


def test_www_slug_is_no_match(registry):
    assert match_fhd(canonicalize("https://www.weebly.com/"), registry) is None


def test_path_suffix_scheme(registry):
    match = match_fhd(canonicalize("https://sites.google.com/view/acct-verify"),
                      registry)
    assert match is not None
    assert match.entry.name == "Google Sites"
    assert match.site_slug == "view/acct-verify"


def test_path_suffix_without_path_is_no_match(registry):
    assert match_fhd(canonicalize("https://sites.google.com/"), registry) is None


def test_non_fhd_is_no_match(registry):
    assert match_fhd(canonicalize("https://example.com/a"), registry) is None


def test_match_is_deterministic(registry):
    url = canonicalize("https://a-site.000webhostapp.com/x")
    results = {match_fhd(url, registry).entry.name for _ in range(5)}
    assert results == {"000webhost"}


def test_default_registry_pairwise_prefix_disjoint(registry):
    bases = [e.base_domain for e in registry]
    for a in bases:
        for b in bases:
            if a != b:
                assert not a.endswith("." + b)


def test_handcrafted_urls_match_at_most_one_entry(registry):
    urls = [
        "https://x.weebly.com/", "https://sites.google.com/a",
        "https://docs.google.com/forms/d/e/abc/viewform",
        "https://a.b.duckdns.org/", "https://t.sharepoint.com/sites/x",
        "https://shop.square.site/", "https://forms.zohopublic.com/org/form/f1",
    ]
    for raw in urls:
        url = canonicalize(raw)
        hits = []
        for entry in registry:
            if entry.subdomain_scheme == SUBDOMAIN_PREFIX:
                if url.host.endswith("." + entry.base_domain):
                    hits.append(entry.name)
            elif url.host == entry.base_domain and url.path.strip("/"):
                hits.append(entry.name)
        assert len(hits) <= 1, (raw, hits)
