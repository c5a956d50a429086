"""Abuse-report generation and the reported/control removal experiment.

Every second newly classified phishing URL (uniformly chosen within each
consecutive pair) is assigned to the reported arm; reports render to
standards-conformant internet-message files that an operator sends manually.
Removal outcomes come from the registrar timeline in the observation log, and
the arms are compared with Mann-Whitney U (primary) plus a seeded
equal-size-pairing t test mirroring the original protocol.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import mimetypes
import random
from dataclasses import dataclass
from email import policy
from email.message import EmailMessage
from email.utils import format_datetime
from pathlib import Path

from .errors import ReportError
from .forest import Verdict
from .monitor import ObservationLog
from .registry import CanonicalUrl, FhdEntry
from .snapshots import Snapshot
from .stats import TTestResult, mann_whitney_u, median_timedelta, paired_t_test

log = logging.getLogger(__name__)

ARMS = ("reported", "control")
DEFAULT_SENDER = "abuse-reports@freephish.invalid"
_BOUNDARY = "===============freephish-report=="


@dataclass(frozen=True)
class AbuseReport:
    url: CanonicalUrl
    fhd: FhdEntry
    created_at: dt.datetime
    arm: str
    target_brand: str | None = None
    screenshot_ref: str | None = None
    sent_to: str | None = None
    removal_observed_at: dt.datetime | None = None

    def __post_init__(self):
        if self.arm not in ARMS:
            raise ReportError(f"unknown arm {self.arm!r}")
        if self.arm == "reported" and not self.sent_to:
            raise ReportError("reported arm requires sent_to")
        if (self.removal_observed_at is not None
                and self.removal_observed_at < self.created_at):
            raise ReportError("removal_observed_at precedes created_at")

    @property
    def report_id(self) -> str:
        key = f"{self.url.serialized}\n{self.created_at.isoformat()}"
        return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


def assign_arm(new_phishing_urls: list[str], seed: int) -> list[tuple[str, str]]:
    """Assign arms pairwise: each consecutive pair contributes exactly one
    reported and one control URL; a trailing odd URL gets a fair coin."""
    rng = random.Random(seed)
    assignments: list[tuple[str, str]] = []
    i = 0
    while i + 1 < len(new_phishing_urls):
        first_reported = rng.random() < 0.5
        assignments.append((new_phishing_urls[i],
                            "reported" if first_reported else "control"))
        assignments.append((new_phishing_urls[i + 1],
                            "control" if first_reported else "reported"))
        i += 2
    if i < len(new_phishing_urls):
        arm = "reported" if rng.random() < 0.5 else "control"
        assignments.append((new_phishing_urls[i], arm))
    return assignments


def build_report(snapshot: Snapshot, verdict: Verdict, registry_entry: FhdEntry,
                 arm: str = "reported",
                 created_at: dt.datetime | None = None) -> AbuseReport:
    """Assemble a report for a phishing verdict.

    A missing abuse contact forces the control arm (with a warning); a
    missing screenshot degrades the rendered message to text-only.
    """
    if verdict.label != "phishing":
        raise ReportError(f"cannot report a {verdict.label!r} verdict")
    if arm == "reported" and not registry_entry.abuse_contact:
        log.warning("%s has no abuse contact; forcing control arm",
                    registry_entry.name)
        arm = "control"
    return AbuseReport(
        url=snapshot.url,
        fhd=registry_entry,
        created_at=created_at or dt.datetime.now(dt.timezone.utc),
        arm=arm,
        target_brand=verdict.features.target_brand,
        screenshot_ref=snapshot.screenshot_ref,
        sent_to=registry_entry.abuse_contact if arm == "reported" else None,
    )


def render_email(report: AbuseReport, sender: str = DEFAULT_SENDER) -> bytes:
    """Render the report as RFC 5322 message bytes (never transmitted here).

    Output is byte-stable for a fixed report: the multipart boundary is
    pinned and the Date header comes from created_at.
    """
    if report.arm != "reported":
        raise ReportError("control-arm reports have no rendered message")
    msg = EmailMessage(policy=policy.SMTP)
    msg["From"] = sender
    msg["To"] = report.sent_to
    msg["Subject"] = f"Phishing website report: {report.url.host}"
    msg["Date"] = format_datetime(report.created_at)
    lines = [
        "A phishing website is being hosted on your service.",
        "",
        f"Full URL: {report.url.serialized}",
        f"Hosting service: {report.fhd.name}",
        f"Targeted organization: {report.target_brand or 'unknown'}",
        f"First observed: {report.created_at.isoformat()}",
        "",
        "Please take this website down and notify us of the outcome.",
    ]
    if report.screenshot_ref is None:
        lines.append("")
        lines.append("A screenshot is not available for this website.")
    msg.set_content("\n".join(lines))
    if report.screenshot_ref is not None:
        data = Path(report.screenshot_ref).read_bytes()
        ctype = mimetypes.guess_type(report.screenshot_ref)[0] or "application/octet-stream"
        maintype, _, subtype = ctype.partition("/")
        msg.add_attachment(data, maintype=maintype, subtype=subtype,
                           filename=Path(report.screenshot_ref).name)
        msg.set_boundary(_BOUNDARY)
    return msg.as_bytes()


def write_message_file(report: AbuseReport, out_dir: str | Path,
                       sender: str = DEFAULT_SENDER) -> Path:
    out = Path(out_dir) / f"{report.report_id}.eml"
    out.write_bytes(render_email(report, sender=sender))
    return out


def save_reports(reports: list[AbuseReport], path: str | Path) -> None:
    """Write reports as JSONL (FHD referenced by registry name)."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(json.dumps({
                "url": r.url.serialized,
                "fhd": r.fhd.name,
                "created_at": r.created_at.isoformat(),
                "arm": r.arm,
                "target_brand": r.target_brand,
                "screenshot_ref": r.screenshot_ref,
                "sent_to": r.sent_to,
                "removal_observed_at": (r.removal_observed_at.isoformat()
                                        if r.removal_observed_at else None),
            }) + "\n")


def load_reports(path: str | Path, registry) -> list[AbuseReport]:
    from .registry import canonicalize

    reports = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            entry = registry.get(rec["fhd"])
            if entry is None:
                raise ReportError(f"line {lineno}: unknown FHD {rec['fhd']!r}")
            removal = rec.get("removal_observed_at")
            reports.append(AbuseReport(
                url=canonicalize(rec["url"]),
                fhd=entry,
                created_at=dt.datetime.fromisoformat(rec["created_at"]),
                arm=rec["arm"],
                target_brand=rec.get("target_brand"),
                screenshot_ref=rec.get("screenshot_ref"),
                sent_to=rec.get("sent_to"),
                removal_observed_at=(dt.datetime.fromisoformat(removal)
                                     if removal else None),
            ))
    return reports


@dataclass(frozen=True)
class ArmStats:
    n: int
    removed: int
    removal_rate: float
    median_removal: dt.timedelta | None


@dataclass(frozen=True)
class RemovalComparison:
    overall: dict[str, ArmStats]
    per_fhd: dict[str, dict[str, ArmStats]]
    mwu: tuple[float, float] | None
    paired_t: TTestResult | None
    responding_only: dict[str, ArmStats] | None = None


def _first_removal(log_: ObservationLog, url_id: str) -> dt.datetime | None:
    for event in sorted((e for e in log_.events
                         if e.url_id == url_id and e.entity == "registrar"),
                        key=lambda e: e.timestamp):
        if event.state == "removed":
            return event.timestamp
    return None


def _arm_stats(reports: list[AbuseReport],
               removal_times: dict[str, dt.timedelta]) -> ArmStats:
    n = len(reports)
    removed = [removal_times[r.url.serialized] for r in reports
               if r.url.serialized in removal_times]
    return ArmStats(
        n=n,
        removed=len(removed),
        removal_rate=len(removed) / n if n else 0.0,
        median_removal=median_timedelta(removed) if removed else None,
    )


def removal_comparison(log_: ObservationLog, reports: list[AbuseReport],
                       responding: set[str] | None = None,
                       pairing_seed: int = 0) -> RemovalComparison:
    """Per-arm and per-FHD removal rates and median removal times.

    Removal time is the first registrar "removed" event minus the report's
    created_at. The arm comparison uses Mann-Whitney U; the seeded equal-size
    random pairing feeds the paired t test for fidelity to the original
    protocol. ``responding`` restricts a second aggregate to FHDs that
    responded to reports.
    """
    removal_times: dict[str, dt.timedelta] = {}
    for report in reports:
        removed_at = report.removal_observed_at
        if removed_at is None:
            removed_at = _first_removal(log_, report.url.serialized)
        if removed_at is None:
            continue
        if removed_at < report.created_at:
            # log and report disagree on ordering; exclude rather than emit
            # a negative removal time
            log.warning("removal for %s observed at %s, before the report's "
                        "created_at %s; excluded from removal stats",
                        report.url.serialized, removed_at, report.created_at)
            continue
        removal_times[report.url.serialized] = removed_at - report.created_at

    by_arm = {arm: [r for r in reports if r.arm == arm] for arm in ARMS}
    overall = {arm: _arm_stats(rs, removal_times) for arm, rs in by_arm.items()}

    per_fhd: dict[str, dict[str, ArmStats]] = {}
    for report in reports:
        per_fhd.setdefault(report.fhd.name, {})
    for name in per_fhd:
        group = [r for r in reports if r.fhd.name == name]
        per_fhd[name] = {
            arm: _arm_stats([r for r in group if r.arm == arm], removal_times)
            for arm in ARMS
        }

    reported_hours = sorted(
        removal_times[r.url.serialized].total_seconds() / 3600.0
        for r in by_arm["reported"] if r.url.serialized in removal_times)
    control_hours = sorted(
        removal_times[r.url.serialized].total_seconds() / 3600.0
        for r in by_arm["control"] if r.url.serialized in removal_times)

    mwu = None
    if len(reported_hours) >= 2 and len(control_hours) >= 2:
        mwu = mann_whitney_u(reported_hours, control_hours)

    paired = None
    k = min(len(reported_hours), len(control_hours))
    if k >= 2:
        rng = random.Random(pairing_seed)
        sample_a = rng.sample(reported_hours, k)
        sample_b = rng.sample(control_hours, k)
        paired = paired_t_test(sample_a, sample_b)

    responding_only = None
    if responding is not None:
        subset = [r for r in reports if r.fhd.name in responding]
        responding_only = {
            arm: _arm_stats([r for r in subset if r.arm == arm], removal_times)
            for arm in ARMS
        }

    return RemovalComparison(overall=overall, per_fhd=per_fhd, mwu=mwu,
                             paired_t=paired, responding_only=responding_only)
