"""Simulated longitudinal monitoring and the coverage statistics.

Entity clients here are scripted: one URL gets blocklisted after 3 hours,
another is taken down by the registrar after 5. The simulated clock advances
one polling interval per cycle, so a week of monitoring runs instantly.
"""

import datetime as dt

from freephish.monitor import (FixtureEntityClient, ObservationLog, SimClock,
                               coverage, run_monitor)
from freephish.stats import mann_whitney_u, paired_t_test

T0 = dt.datetime(2022, 5, 1, tzinfo=dt.timezone.utc)
URL_A = "https://paypal-login.weebly.com/"
URL_B = "https://chase-verify.wixsite.com/"

clients = {
    "gsb": FixtureEntityClient("gsb", {
        URL_A: [(T0 + dt.timedelta(hours=3), "listed")]}),
    "registrar": FixtureEntityClient("registrar", {
        URL_B: [(T0 + dt.timedelta(hours=5), "removed")]}),
}

log = ObservationLog()
for url in (URL_A, URL_B):
    log.register(url, T0)

clock = SimClock(T0)
events = run_monitor([URL_A, URL_B], clients, log, cycles=7 * 24,
                     interval_seconds=3600, clock=clock)
print(f"appended {events} events over a simulated week "
      "(registrar/platform polling stops once a URL is removed)\n")

for entity in ("gsb", "registrar"):
    report = coverage(log, entity)
    print(f"{entity}: coverage {report.coverage_fraction:.1%} of "
          f"{report.n_urls} URLs, median response {report.median_hhmm}")
    print("  curve:", "  ".join(f"{h:g}h={f:.2f}" for h, f in report.curve))

# The statistics used to compare groups of response times:
fhd_hours = [5.6, 7.2, 9.0, 13.5, 16.1, 24.9]
traditional_hours = [1.2, 1.6, 2.1, 2.8, 3.0, 5.5]
u, p = mann_whitney_u(fhd_hours, traditional_hours)
print(f"\nMann-Whitney U over response times: U={u:g}, p={p:.4f}")

before = [5.2, 4.8, 6.1, 5.9, 5.5]
after = [4.9, 4.5, 5.8, 6.2, 5.1]
t = paired_t_test(before, after)
print(f"paired t over matched samples: t={t.t:.3f}, p={t.p:.4f}")
