"""Full offline loop: ingest -> features -> train -> serve -> classify.

This is the pipeline the browser extension depends on, driven end to end
against canned pages on a loopback socket.
"""

import datetime as dt
import json
import tempfile
import urllib.request
from pathlib import Path

from freephish.cli import main
from freephish.registry import default_registry_path
from freephish.service import ClassifierService, ServiceConfig
from freephish.snapshots import FixtureFetcher, load_corpus

NOW = dt.datetime(2022, 5, 1, tzinfo=dt.timezone.utc)

PAGES = {
    "https://paypal-login.weebly.com/": (
        "phishing",
        "<form><input type='password' name='password'></form>"
        "<div class='weebly-footer' style='display:none'>Powered by Weebly</div>"),
    "https://chase-verify.wixsite.com/": (
        "phishing",
        "<meta name='robots' content='noindex'>"
        "<form><input name='username'><input type='password' name='password'></form>"),
    "https://garden-diary.weebly.com/": (
        "benign", "<h1>Garden diary</h1><a href='/photos'>Photos</a>"),
    "https://blog-recipes.weebly.com/": (
        "benign", "<h1>Recipes</h1><a href='/bread'>Bread</a>"),
}

with tempfile.TemporaryDirectory() as tmp:
    work = Path(tmp)
    fixtures = work / "fixtures"
    fixtures.mkdir()
    (fixtures / "manifest.json").write_text(json.dumps(
        {url: {"body": body} for url, (_, body) in PAGES.items()}))
    feed = work / "feed.jsonl"
    feed.write_text("\n".join(
        json.dumps({"url": url, "source": "twitter", "observed_at": NOW.isoformat()})
        for url in PAGES) + "\n")

    corpus = work / "corpus.jsonl"
    main(["ingest", "--feed", str(feed), "--fixtures", str(fixtures),
          "--out", str(corpus)])

    labels = work / "labels.tsv"
    with open(labels, "w") as fh:
        for snap in load_corpus(corpus):
            fh.write(f"{snap.id}\t{PAGES[snap.url.serialized][0]}\n")

    features = work / "features.tsv"
    main(["features", "--corpus", str(corpus), "--out", str(features),
          "--fixtures", str(fixtures), "--labels", str(labels)])
    model = work / "model.json"
    main(["train", "--features", str(features), "--labels", str(labels),
          "--out", str(model)])

    service = ClassifierService(ServiceConfig(
        model_path=model, registry_path=default_registry_path(), port=0,
        fetcher=FixtureFetcher.from_dir(fixtures)))
    port = service.start()
    print(f"\nservice on 127.0.0.1:{port}")
    try:
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/health") as resp:
            print("health:", json.loads(resp.read()))
        for url in list(PAGES) + ["https://www.example.com/"]:
            req = urllib.request.Request(
                f"http://127.0.0.1:{port}/classify",
                data=json.dumps({"url": url}).encode(), method="POST")
            with urllib.request.urlopen(req) as resp:
                payload = json.loads(resp.read())
            verdict = payload["verdict"]
            print(f"  {verdict['label']:<8} score={verdict['score']:.2f} "
                  f"is_fhd={payload['is_fhd']!s:<5} {url}")
    finally:
        service.stop()
