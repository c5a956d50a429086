import logging
import random

import pytest

from conftest import golden_snapshot, make_snapshot
from freephish.errors import ScannerError
from freephish.features import (Brand, ExtractorConfig, FEATURE_NAMES,
                                FixtureScanner, default_config,
                                detect_banner_obfuscation,
                                detect_credential_fields,
                                detect_external_phish_link,
                                detect_malicious_download, detect_noindex,
                                extract_features, identify_target, link_ratios,
                                registrable_domain, url_keyword_hit)
from freephish.registry import canonicalize
from freephish.snapshots import FixtureFetcher


# --- configuration defaults --------------------------------------------------

def test_shipped_keyword_list_sizes(config):
    assert len(config.credential_keywords) == 17
    assert len(config.url_keywords) == 30
    assert len(config.brand_list) >= 100


def test_config_normalizes_and_dedups_keywords():
    cfg = ExtractorConfig(credential_keywords=("Login", "login", " PASSWORD "),
                          url_keywords=("Free", "free"),
                          brand_list=(Brand("paypal", "paypal.com"),))
    assert cfg.credential_keywords == ("login", "password")
    assert cfg.url_keywords == ("free",)


def test_config_rejects_bad_thresholds():
    brands = (Brand("paypal", "paypal.com"),)
    with pytest.raises(ValueError):
        ExtractorConfig(("a",), ("b",), brands, brand_match_threshold=0)
    with pytest.raises(ValueError):
        ExtractorConfig(("a",), ("b",), brands, follow_depth=-1)
    with pytest.raises(ValueError):
        ExtractorConfig(("a",), ("b",), brands, download_detection_threshold=0)


def test_search_terms_absent_from_shipped_credential_list(config):
    # required so a bare search box stays negative
    for term in ("search", "query"):
        assert all(k not in term for k in config.credential_keywords)


# --- credential fields -------------------------------------------------------

def test_form_with_input_detected(config):
    body = '<form><input name="password"></form>'
    assert detect_credential_fields(body, config.credential_keywords) == 1


def test_input_outside_form_matched_by_keyword(config):
    body = '<input placeholder="Sign-in email">'
    assert detect_credential_fields(body, config.credential_keywords) == 1


def test_search_input_not_credential(config):
    body = '<input type="search" name="query">'
    assert detect_credential_fields(body, config.credential_keywords) == 0


def test_label_text_matched(config):
    body = '<label for="u">Username</label><input id="u" type="text">'
    assert detect_credential_fields(body, config.credential_keywords) == 1


def test_keyword_match_case_insensitive(config):
    body = '<INPUT NAME="PASSWORD">'
    assert detect_credential_fields(body, config.credential_keywords) == 1


# --- banner obfuscation --------------------------------------------------------

@pytest.fixture
def weebly(registry):
    return registry.get("Weebly")


BANNER = '<div class="weebly-footer">Powered by Weebly</div>'


@pytest.mark.parametrize("style", ["visibility: hidden", "display:none",
                                   "height: 0", "height:0px", "opacity:0",
                                   "opacity: 0.0"])
def test_hidden_banner_styles(weebly, style):
    body = f'<div class="weebly-footer" style="{style}">Powered by Weebly</div>'
    assert detect_banner_obfuscation(body, weebly) == 1


def test_visible_banner_not_flagged(weebly):
    assert detect_banner_obfuscation(BANNER, weebly) == 0


def test_commented_banner_flagged(weebly):
    assert detect_banner_obfuscation(f"<!-- {BANNER} -->", weebly) == 1


def test_style_block_rule_flagged(weebly):
    body = f"<style>.weebly-footer {{ display: none; }}</style>{BANNER}"
    assert detect_banner_obfuscation(body, weebly) == 1


def test_partial_opacity_not_flagged(weebly):
    body = '<div class="weebly-footer" style="opacity: 0.5">x</div>'
    assert detect_banner_obfuscation(body, weebly) == 0


def test_entry_without_markers_never_flags(registry):
    duckdns = registry.get("DuckDNS")
    assert detect_banner_obfuscation(
        '<div style="display:none">anything</div>', duckdns) == 0


# --- noindex -------------------------------------------------------------------

def test_noindex_meta_token():
    assert detect_noindex('<meta name="robots" content="noindex,nofollow">') == 1


def test_empty_body_no_noindex():
    assert detect_noindex("") == 0


def test_index_follow_is_negative():
    assert detect_noindex('<meta name="robots" content="index,follow">') == 0


def test_bare_noindex_tag():
    assert detect_noindex("<noindex><p>x</p></noindex>") == 1


def test_noindex_token_must_match_exactly():
    assert detect_noindex('<meta name="robots" content="nonoindexing">') == 0


# --- target identification ------------------------------------------------------

def test_typo_slug_within_threshold(config):
    url = canonicalize("https://paypa1-secure.weebly.com/")
    # LV(paypa1, paypal) = 1, normalized 1/6 <= 0.25
    assert identify_target(url, "", config, slug="paypa1-secure") == "paypal"


def test_benign_slug_matches_nothing(config):
    url = canonicalize("https://blog-recipes.weebly.com/")
    assert identify_target(url, "", config, slug="blog-recipes") is None


def test_exact_brand_slug(config):
    url = canonicalize("https://chase.weebly.com/x")
    assert identify_target(url, "", config, slug="chase") == "chase"


def test_substring_containment_catches_concatenation(config):
    url = canonicalize("https://paypallogin.weebly.com/")
    assert identify_target(url, "", config, slug="paypallogin") == "paypal"


def test_tie_breaks_on_distance_then_name():
    cfg = default_config(brand_list=(Brand("bbbb", "bbbb.com"),
                                     Brand("aaaa", "aaaa.com")))
    url = canonicalize("https://aaaa-bbbb.weebly.com/")
    # both at distance 0; lexicographic brand name wins
    assert identify_target(url, "", cfg, slug="aaaa-bbbb") == "aaaa"


def test_text_extractor_fallback(config):
    from dataclasses import replace

    cfg = replace(config, text_extractor=lambda body: "Welcome to PayPal")
    url = canonicalize("https://zzqqx.weebly.com/")
    assert identify_target(url, "<img src='header.png'>", cfg, slug="zzqqx") == "paypal"
    assert identify_target(url, "", config, slug="zzqqx") is None


def test_official_domain_label_matches(config):
    url = canonicalize("https://wellsfargo.weebly.com/")
    assert identify_target(url, "", config, slug="wellsfargo") == "wellsfargo"


# --- two-step phish --------------------------------------------------------------

CRED_PAGE = '<form><input type="password" name="password"></form>'


def _fetcher(mapping):
    return FixtureFetcher({url: {"body": body} for url, body in mapping.items()})


def test_button_to_external_cred_page(registry, config):
    snap = make_snapshot(
        "https://sites.google.com/view/docs-x",
        '<a href="https://paypal-login.evil.example/"><button>Open</button></a>')
    fetcher = _fetcher({"https://paypal-login.evil.example/": CRED_PAGE})
    assert detect_external_phish_link(snap, fetcher, registry, config) == 1


def test_page_with_own_credentials_skips_following(registry, config):
    snap = make_snapshot("https://x.weebly.com/",
                         CRED_PAGE + '<a href="https://a.example/"><button>b</button></a>')
    fetcher = _fetcher({"https://a.example/": CRED_PAGE})
    assert detect_external_phish_link(snap, fetcher, registry, config) == 0


def test_cycle_terminates_at_depth_two(registry, config):
    from dataclasses import replace

    page_a = '<a role="button" href="https://b.glitch.me/">go</a>'
    page_b = '<a role="button" href="https://a.glitch.me/">back</a>'
    snap = make_snapshot("https://a.glitch.me/", page_a)
    fetcher = _fetcher({"https://b.glitch.me/": page_b,
                        "https://a.glitch.me/": page_a})
    cfg = replace(config, follow_depth=2)
    assert detect_external_phish_link(snap, fetcher, registry, cfg) == 0


def test_second_hop_found_at_depth_two(registry, config):
    from dataclasses import replace

    snap = make_snapshot("https://landing.glitch.me/",
                         '<a role="button" href="https://middle.example/">go</a>')
    fetcher = _fetcher({
        "https://middle.example/":
            '<iframe src="https://chase-verify.evil.example/"></iframe>',
        "https://chase-verify.evil.example/": CRED_PAGE,
    })
    assert detect_external_phish_link(snap, fetcher, registry, config) == 0
    cfg = replace(config, follow_depth=2)
    assert detect_external_phish_link(snap, fetcher, registry, cfg) == 1


def test_fetch_failure_degrades_to_zero(registry, config):
    snap = make_snapshot("https://x.weebly.com/",
                         '<a href="https://gone.example/"><button>go</button></a>')
    fetcher = FixtureFetcher({"https://gone.example/": {"error": "timeout"}})
    assert detect_external_phish_link(snap, fetcher, registry, config) == 0


def test_cred_page_without_brand_or_fhd_is_zero(registry, config):
    snap = make_snapshot("https://x.weebly.com/",
                         '<a href="https://zzqqx-portal.example/"><button>go</button></a>')
    fetcher = _fetcher({"https://zzqqx-portal.example/": CRED_PAGE})
    assert detect_external_phish_link(snap, fetcher, registry, config) == 0


# --- malicious download -----------------------------------------------------------

def test_download_above_threshold(config):
    snap = make_snapshot("https://x.sharepoint.com/", "",
                         download={"filename": "a.exe", "byte_size": 1,
                                   "content_hash": "h1"})
    assert detect_malicious_download(snap, FixtureScanner({"h1": 7}), config) == 1


def test_download_below_threshold(config):
    snap = make_snapshot("https://x.sharepoint.com/", "",
                         download={"filename": "a.exe", "byte_size": 1,
                                   "content_hash": "h1"})
    assert detect_malicious_download(snap, FixtureScanner({"h1": 3}), config) == 0


def test_threshold_is_inclusive(config):
    snap = make_snapshot("https://x.sharepoint.com/", "",
                         download={"filename": "a.exe", "byte_size": 1,
                                   "content_hash": "h1"})
    assert detect_malicious_download(snap, FixtureScanner({"h1": 4}), config) == 1


def test_no_download_is_zero(config):
    snap = make_snapshot("https://x.sharepoint.com/", "<p>x</p>")
    assert detect_malicious_download(snap, FixtureScanner({}), config) == 0


def test_unknown_hash_is_zero(config):
    snap = make_snapshot("https://x.sharepoint.com/", "",
                         download={"filename": "a.exe", "byte_size": 1,
                                   "content_hash": "mystery"})
    assert detect_malicious_download(snap, FixtureScanner({}), config) == 0


def test_scanner_error_is_zero_with_warning(config, caplog):
    class FailingScanner:
        def detections(self, content_hash):
            raise ScannerError("api down")

    snap = make_snapshot("https://x.sharepoint.com/", "",
                         download={"filename": "a.exe", "byte_size": 1,
                                   "content_hash": "h1"})
    with caplog.at_level(logging.WARNING):
        assert detect_malicious_download(snap, FailingScanner(), config) == 0
    assert "scanner failed" in caplog.text


# --- url keywords ------------------------------------------------------------------

def test_keyword_in_slug():
    cfg = default_config(url_keywords=("claim", "login", "free"))
    url = canonicalize("https://free-gift-claim.weebly.com/")
    assert url_keyword_hit(url, cfg, slug="free-gift-claim") == 1


def test_no_keyword(config):
    url = canonicalize("https://xqzt.weebly.com/")
    assert url_keyword_hit(url, config, slug="xqzt") == 0


def test_substring_semantics_mid_token(config):
    url = canonicalize("https://loginz.weebly.com/")
    assert url_keyword_hit(url, config, slug="loginz") == 1


def test_keyword_in_query(config):
    url = canonicalize("https://xqzt.weebly.com/page?next=login")
    assert url_keyword_hit(url, config, slug="xqzt") == 1


# --- link ratios ---------------------------------------------------------------------

def test_mixed_anchor_ratios():
    body = ('<a href="https://www.bankofamerica.com/a">1</a>'
            '<a href="https://bankofamerica.com/b">2</a>'
            '<a href="#">3</a><a href="/a">4</a>')
    assert link_ratios(body, "foo.weebly.com", base_domain="weebly.com") == (0.5, 0.25)


def test_no_anchors_is_zero_zero():
    assert link_ratios("<p>x</p>", "foo.weebly.com") == (0.0, 0.0)


def test_all_hash_anchors():
    body = '<a href="#">a</a><a href="#">b</a>'
    assert link_ratios(body, "foo.weebly.com") == (0.0, 1.0)


def test_same_fhd_subdomain_not_external():
    body = '<a href="https://other.weebly.com/">x</a>'
    assert link_ratios(body, "foo.weebly.com", base_domain="weebly.com") == (0.0, 0.0)


def test_javascript_void_counts_empty():
    body = '<a href="javascript:void(0)">x</a>'
    assert link_ratios(body, "foo.weebly.com") == (0.0, 1.0)


def test_registrable_domain_helper():
    assert registrable_domain("www.bankofamerica.com") == "bankofamerica.com"
    assert registrable_domain("a.b.co.uk") == "b.co.uk"
    assert registrable_domain("weebly.com") == "weebly.com"


# --- extract_features composition ------------------------------------------------------

def test_full_vector_determinism(registry, config, golden_manifest,
                                 golden_fetcher, golden_scanner):
    fixture = next(f for f in golden_manifest["fixtures"] if f["name"] == "full_phish")
    snap = golden_snapshot(fixture)
    first = extract_features(snap, registry, config, golden_fetcher, golden_scanner)
    second = extract_features(snap, registry, config, golden_fetcher, golden_scanner)
    assert first == second


def test_case_insensitivity_of_body(registry, config):
    body = ('<form><input name="password"></form>'
            '<meta name="robots" content="noindex">'
            '<div class="weebly-footer" style="visibility: hidden">x</div>')
    lower = make_snapshot("https://paypal-login.weebly.com/", body)
    upper = make_snapshot("https://paypal-login.weebly.com/", body.upper())
    v1 = extract_features(lower, registry, config)
    v2 = extract_features(upper, registry, config)
    assert v1.values() == v2.values()


def test_vector_bounds_on_random_html(registry, config):
    rng = random.Random(31)
    fragments = ['<a href="#">', '<a href="https://x.example/">', "<form>",
                 '<input name="password">', "</form>", "<div", ">", "<p>text",
                 '<meta name="robots" content="noindex">', "<iframe src='/x'>",
                 "<!-- c -->", '"', "<", ">", "plain text ", "<button>",
                 '<div style="display:none">', "</div>"]
    for _ in range(60):
        body = "".join(rng.choice(fragments) for _ in range(rng.randrange(0, 30)))
        snap = make_snapshot("https://random-page.weebly.com/", body)
        vec = extract_features(snap, registry, config)
        for name in FEATURE_NAMES[:8]:
            assert getattr(vec, name) in (0, 1)
        assert 0.0 <= vec.external_link_ratio <= 1.0
        assert 0.0 <= vec.empty_link_ratio <= 1.0


def test_non_fhd_snapshot_flags_zero(registry, config):
    snap = make_snapshot("https://self-hosted.example.com/login",
                         '<form><input name="password"></form>')
    vec = extract_features(snap, registry, config)
    assert vec.is_fhd_hosted == 0
    assert vec.has_credential_fields == 1
