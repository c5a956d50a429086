"""Operator command line.

Subcommands: ingest, features, train, eval, classify, similarity, monitor,
stats, report, serve, keywords. Every subcommand runs offline against
fixture files; exit status 0 on success, 1 with a one-line `error: ...` on
failure, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import re
import sys
from pathlib import Path

from . import featurefile, keywords as keywords_mod, monitor as monitor_mod
from . import reporting, similarity as similarity_mod
from .errors import FreephishError
from .features import FixtureScanner, default_config, extract_features, load_config
from .featurefile import FeatureRow
from .forest import (ForestParams, LabeledDataset, evaluate, load_forest,
                     predict, save_forest, train_forest)
from .registry import default_registry, load_registry
from .service import ClassifierService, ServiceConfig
from .snapshots import FixtureFetcher, SnapshotStore, ingest, load_corpus, load_feed
from .stats import format_p

_DURATION = re.compile(r"^(\d+(?:\.\d+)?)([smhd]?)$")
_DURATION_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400, "": 3600}


def parse_duration(text: str) -> dt.timedelta:
    """Durations like 168h, 7d, 90m, 600s; bare numbers are hours."""
    m = _DURATION.match(text.strip())
    if not m:
        raise FreephishError(f"cannot parse duration {text!r}")
    return dt.timedelta(seconds=float(m.group(1)) * _DURATION_UNITS[m.group(2)])


def _registry_from(args) -> "Registry":
    if getattr(args, "registry", None):
        return load_registry(args.registry)
    return default_registry()


def _load_labels(path: str) -> dict[str, str]:
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            snap_id, _, label = line.partition("\t")
            labels[snap_id] = label
    return labels


def cmd_ingest(args) -> int:
    registry = _registry_from(args)
    fetcher = FixtureFetcher.from_dir(args.fixtures)
    store = SnapshotStore(args.out)
    count = skipped = 0
    for item in load_feed(args.feed):
        snap = ingest(item, fetcher, registry, store)
        if snap is None:
            skipped += 1
        else:
            count += 1
    print(f"ingested {count} snapshots ({skipped} skipped, "
          f"{len(store.failed_fetches)} fetch failures) -> {args.out}")
    return 0


def cmd_features(args) -> int:
    registry = _registry_from(args)
    config = load_config(args.config) if args.config else default_config()
    fetcher = FixtureFetcher.from_dir(args.fixtures) if args.fixtures else None
    scanner = None
    if args.scanner:
        with open(args.scanner, encoding="utf-8") as fh:
            scanner = FixtureScanner(json.load(fh))
    labels = _load_labels(args.labels) if args.labels else {}
    rows = []
    for snap in load_corpus(args.corpus):
        vector = extract_features(snap, registry, config,
                                  fetcher=fetcher, scanner=scanner)
        rows.append(FeatureRow(snapshot_id=snap.id, url=snap.url.serialized,
                               vector=vector, label=labels.get(snap.id)))
    featurefile.write_features(args.out, rows)
    print(f"wrote {len(rows)} feature rows -> {args.out}")
    return 0


def _dataset_from_rows(rows: list[FeatureRow]) -> LabeledDataset:
    labeled = [(r.vector, r.label) for r in rows if r.label]
    if not labeled:
        raise FreephishError("no labeled rows in features file")
    return LabeledDataset(labeled)


def cmd_train(args) -> int:
    rows = featurefile.read_features(args.features)
    labels = _load_labels(args.labels)
    for i, row in enumerate(rows):
        if row.snapshot_id in labels:
            rows[i] = FeatureRow(row.snapshot_id, row.url, row.vector,
                                 labels[row.snapshot_id])
    dataset = _dataset_from_rows(rows)
    params = ForestParams()
    if args.params:
        with open(args.params, encoding="utf-8") as fh:
            params = ForestParams.from_dict(json.load(fh))
    forest = train_forest(dataset, params, n_jobs=args.jobs)
    save_forest(forest, args.out)
    print(f"trained {params.n_trees} trees on {len(dataset)} rows "
          f"-> {args.out} (model_version {forest.model_version})")
    return 0


def _print_metrics(metrics) -> None:
    print(f"accuracy: {metrics.accuracy:.4f}")
    for label, cm in sorted(metrics.per_class.items()):
        print(f"{label}: precision {cm.precision:.4f} recall {cm.recall:.4f} "
              f"f1 {cm.f1:.4f}")
    auc = "n/a" if metrics.roc_auc is None else f"{metrics.roc_auc:.4f}"
    print(f"roc_auc: {auc}")
    c = metrics.confusion
    print(f"confusion: tp={c['tp']} fp={c['fp']} fn={c['fn']} tn={c['tn']}")


def cmd_eval(args) -> int:
    forest = load_forest(args.model)
    rows = featurefile.read_features(args.features)
    dataset = _dataset_from_rows(rows)
    _print_metrics(evaluate(forest, dataset))
    return 0


def cmd_classify(args) -> int:
    registry_path = args.registry or str(_default_registry_path())
    service = ClassifierService(ServiceConfig(
        model_path=args.model, registry_path=registry_path,
        fetcher=FixtureFetcher.from_dir(args.fixtures) if args.fixtures else None))
    html = Path(args.html).read_text(encoding="utf-8") if args.html else None
    payload = service.classify(args.url, html=html)
    verdict = payload["verdict"]
    print(f"{args.url}\t{verdict['label']}\t{verdict['score']:.3f}\t"
          f"fhd={payload['fhd_name'] or '-'}")
    return 0


def _default_registry_path() -> Path:
    from .registry import default_registry_path
    return default_registry_path()


def cmd_similarity(args) -> int:
    body_a = Path(args.file_a).read_text(encoding="utf-8")
    body_b = Path(args.file_b).read_text(encoding="utf-8")
    result = similarity_mod.compare_pages(body_a, body_b, cap=args.cap,
                                          seed=args.seed)
    flag = " (approximate)" if result.approximate else ""
    print(f"sim_a_to_b: {result.sim_a_to_b:.6f}")
    print(f"sim_b_to_a: {result.sim_b_to_a:.6f}")
    print(f"overall: {result.overall:.6f}{flag}")
    return 0


def cmd_monitor(args) -> int:
    log_ = monitor_mod.ObservationLog()
    targets = []
    with open(args.targets, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            log_.register(rec["url"], dt.datetime.fromisoformat(rec["first_seen"]))
            targets.append(rec["url"])
    clients = monitor_mod.load_fixture_clients(args.clients)
    start = min(log_.first_seen.values())
    clock = monitor_mod.SimClock(start)
    total = monitor_mod.run_monitor(
        targets, clients, log_, cycles=args.cycles,
        interval_seconds=args.interval,
        horizon=parse_duration(args.horizon), clock=clock)
    log_.save(args.out)
    print(f"appended {total} events over {args.cycles} cycles -> {args.out}")
    return 0


def cmd_stats(args) -> int:
    if args.stats_command == "coverage":
        log_ = monitor_mod.ObservationLog.load(args.log)
        report = monitor_mod.coverage(log_, args.entity,
                                      horizon=parse_duration(args.horizon))
        print(f"entity: {report.entity}")
        print(f"urls: {report.n_urls}")
        print(f"coverage: {report.coverage_fraction:.1%}")
        print(f"median_response: {report.median_hhmm or 'n/a'}")
        for hours, fraction in report.curve:
            print(f"  {hours:g}h\t{fraction:.4f}")
        return 0
    raise FreephishError(f"unknown stats subcommand {args.stats_command!r}")


def cmd_report(args) -> int:
    registry = _registry_from(args)
    if args.report_command == "assign":
        urls = [l.strip() for l in Path(args.urls).read_text().splitlines() if l.strip()]
        assignments = reporting.assign_arm(urls, seed=args.seed)
        out = "\n".join(f"{url}\t{arm}" for url, arm in assignments)
        if args.out:
            Path(args.out).write_text(out + "\n", encoding="utf-8")
        else:
            print(out)
        return 0
    if args.report_command == "build":
        forest = load_forest(args.model)
        arms = {}
        for line in Path(args.assignments).read_text().splitlines():
            if line.strip():
                url, _, arm = line.partition("\t")
                arms[url] = arm
        from .registry import match_fhd
        reports = []
        for snap in load_corpus(args.corpus):
            if snap.url.serialized not in arms:
                continue
            m = match_fhd(snap.url, registry)
            if m is None:
                continue
            vector = extract_features(snap, registry)
            verdict = predict(forest, vector)
            if verdict.label != "phishing":
                continue
            reports.append(reporting.build_report(
                snap, verdict, m.entry, arm=arms[snap.url.serialized],
                created_at=snap.fetch_time))
        reporting.save_reports(reports, args.out)
        print(f"built {len(reports)} reports -> {args.out}")
        return 0
    if args.report_command == "render":
        reports = reporting.load_reports(args.reports, registry)
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = 0
        for report in reports:
            if report.arm == "reported":
                reporting.write_message_file(report, out_dir)
                written += 1
        print(f"rendered {written} message files -> {out_dir}")
        return 0
    if args.report_command == "compare":
        log_ = monitor_mod.ObservationLog.load(args.log)
        reports = reporting.load_reports(args.reports, registry)
        comparison = reporting.removal_comparison(log_, reports)
        for arm, st in comparison.overall.items():
            median = ("n/a" if st.median_removal is None
                      else monitor_mod.format_hhmm(st.median_removal))
            print(f"{arm}: n={st.n} removed={st.removed} "
                  f"rate={st.removal_rate:.1%} median={median}")
        for name, arms_stats in sorted(comparison.per_fhd.items()):
            parts = []
            for arm in reporting.ARMS:
                st = arms_stats[arm]
                median = ("n/a" if st.median_removal is None
                          else monitor_mod.format_hhmm(st.median_removal))
                parts.append(f"{arm}: {st.removed}/{st.n} median {median}")
            print(f"  {name}\t" + "\t".join(parts))
        if comparison.mwu:
            u, p = comparison.mwu
            print(f"mann_whitney_u: U={u:g} p={format_p(p)}")
        if comparison.paired_t:
            t = comparison.paired_t
            if t.degenerate:
                print("paired_t: degenerate (zero difference variance)")
            else:
                print(f"paired_t: t={t.t:.4f} p={format_p(t.p)}")
        return 0
    raise FreephishError(f"unknown report subcommand {args.report_command!r}")


def cmd_serve(args) -> int:
    service = ClassifierService(ServiceConfig(
        model_path=args.model,
        registry_path=args.registry or str(_default_registry_path()),
        host=args.host, port=args.port, cache_ttl=args.ttl,
        fetcher=FixtureFetcher.from_dir(args.fixtures) if args.fixtures else None))
    try:
        service.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def cmd_keywords(args) -> int:
    registry = _registry_from(args)
    ranked = keywords_mod.derive_keywords(load_corpus(args.corpus), args.top,
                                          registry)
    for token, count in ranked:
        print(f"{token}\t{count}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freephish",
        description="Detect, measure and report phishing sites on free "
                    "web-hosting domains.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="fetch feed URLs into a snapshot corpus")
    p.add_argument("--feed", required=True)
    p.add_argument("--fixtures", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--registry")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("features", help="extract feature vectors from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--registry")
    p.add_argument("--fixtures")
    p.add_argument("--scanner")
    p.add_argument("--labels")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train the random forest")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--params")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on labeled features")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("classify", help="classify one URL")
    p.add_argument("--model", required=True)
    p.add_argument("--url", required=True)
    p.add_argument("--html")
    p.add_argument("--registry")
    p.add_argument("--fixtures")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("similarity", help="tag-level similarity of two pages")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--cap", type=int, default=similarity_mod.DEFAULT_TAG_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("monitor", help="poll entity clients over a target list")
    p.add_argument("--targets", required=True)
    p.add_argument("--clients", required=True)
    p.add_argument("--interval", type=float, default=600)
    p.add_argument("--horizon", default="168h")
    p.add_argument("--cycles", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("stats", help="statistics over an observation log")
    stats_sub = p.add_subparsers(dest="stats_command", required=True)
    pc = stats_sub.add_parser("coverage")
    pc.add_argument("--log", required=True)
    pc.add_argument("--entity", required=True)
    pc.add_argument("--horizon", default="168h")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="abuse-report workflow")
    report_sub = p.add_subparsers(dest="report_command", required=True)
    pa = report_sub.add_parser("assign")
    pa.add_argument("--urls", required=True)
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--out")
    pa.add_argument("--registry")
    pb = report_sub.add_parser("build")
    pb.add_argument("--corpus", required=True)
    pb.add_argument("--model", required=True)
    pb.add_argument("--assignments", required=True)
    pb.add_argument("--out", required=True)
    pb.add_argument("--registry")
    pr = report_sub.add_parser("render")
    pr.add_argument("--reports", required=True)
    pr.add_argument("--out-dir", required=True)
    pr.add_argument("--registry")
    pp = report_sub.add_parser("compare")
    pp.add_argument("--log", required=True)
    pp.add_argument("--reports", required=True)
    pp.add_argument("--registry")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP classification service")
    p.add_argument("--model", default=os.environ.get("FREEPHISH_MODEL"))
    p.add_argument("--registry", default=os.environ.get("FREEPHISH_REGISTRY"))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("FREEPHISH_PORT", "8787")))
    p.add_argument("--ttl", type=float, default=900.0)
    p.add_argument("--fixtures")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("keywords", help="derive top URL tokens from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--top", type=int, default=30)
    p.add_argument("--registry")
    p.set_defaults(func=cmd_keywords)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve" and not args.model:
        print("error: serve requires --model or FREEPHISH_MODEL", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except FreephishError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
