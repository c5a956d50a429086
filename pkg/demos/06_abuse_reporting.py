"""The reporting experiment: report half the URLs, watch removal times.

Every consecutive pair of newly found phishing URLs contributes one reported
and one control member; reports render to .eml files an operator sends
manually. Removal outcomes come back through the registrar timeline.
"""

import datetime as dt
import tempfile
from pathlib import Path

from freephish import canonicalize, default_registry
from freephish.features import FeatureVector
from freephish.forest import Verdict
from freephish.monitor import ObservationEvent, ObservationLog
from freephish.reporting import (assign_arm, build_report, removal_comparison,
                                 write_message_file)
from freephish.snapshots import Discovery, Snapshot, snapshot_id
from freephish.stats import format_hhmm, format_p

T0 = dt.datetime(2022, 6, 1, tzinfo=dt.timezone.utc)
registry = default_registry()
weebly = registry.get("Weebly")

urls = [f"https://fake-bank-{i}.weebly.com/" for i in range(8)]
assignments = assign_arm(urls, seed=11)
print("arm assignment (one reported per consecutive pair):")
for url, arm in assignments:
    print(f"  {arm:<8} {url}")


def snapshot_for(url: str) -> Snapshot:
    canonical = canonicalize(url)
    body = "<form><input name='password'></form>"
    return Snapshot(id=snapshot_id(canonical.serialized, T0, body),
                    url=canonical, fetch_time=T0, http_status=200, headers=(),
                    body=body,
                    discovery=Discovery(source="twitter", first_seen=T0))


DEMO_VECTOR = FeatureVector(
    is_fhd_hosted=1, has_credential_fields=1, banner_obfuscated=1,
    noindex_present=0, target_identified=1, links_external_phish=0,
    malicious_download=0, url_keyword_hit=1, external_link_ratio=0.4,
    empty_link_ratio=0.2, target_brand="chase")
DEMO_VERDICT = Verdict(label="phishing", score=0.9, model_version="demo",
                       features=DEMO_VECTOR)

# Build reports and render the reported arm to message files.
reports = [build_report(snapshot_for(url), DEMO_VERDICT, weebly, arm=arm,
                        created_at=T0)
           for url, arm in assignments]
with tempfile.TemporaryDirectory() as tmp:
    rendered = [write_message_file(r, tmp) for r in reports
                if r.arm == "reported"]
    print(f"\nrendered {len(rendered)} message files, e.g. {Path(rendered[0]).name}")
    print("--- first message, first lines ---")
    for line in Path(rendered[0]).read_bytes().decode().splitlines()[:6]:
        print(f"  {line}")

# Simulated registrar outcomes: reported URLs come down in ~2h, controls ~7h.
log = ObservationLog()
for i, report in enumerate(reports):
    url_id = report.url.serialized
    log.register(url_id, T0)
    gap = dt.timedelta(hours=2 if report.arm == "reported" else 7, minutes=7 * i)
    log.append(ObservationEvent(url_id, "registrar", T0 + gap, "removed"))

summary = removal_comparison(log, reports)
print("\nremoval outcome by arm:")
for arm, stats in summary.overall.items():
    print(f"  {arm:<8} n={stats.n} removed={stats.removed} "
          f"rate={stats.removal_rate:.0%} median={format_hhmm(stats.median_removal)}")
u, p = summary.mwu
print(f"Mann-Whitney U across arms: U={u:g}, p={format_p(p)}")
if summary.paired_t and not summary.paired_t.degenerate:
    print(f"paired t (seeded random pairing): t={summary.paired_t.t:.3f}, "
          f"p={format_p(summary.paired_t.p)}")
