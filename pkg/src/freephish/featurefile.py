"""Columnar text format for extracted feature vectors.

Layout: a version line, a tab-separated header row naming every feature,
then one row per snapshot. The trailing target_brand and label columns are
optional metadata (label is required by `eval` and `train`).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusError
from .features import FEATURE_NAMES, FEATURE_SCHEMA_VERSION, FeatureVector

_VERSION_PREFIX = "#feature_schema="
_META_COLUMNS = ("id", "url")
_TRAIL_COLUMNS = ("target_brand", "label")


@dataclass(frozen=True)
class FeatureRow:
    snapshot_id: str
    url: str
    vector: FeatureVector
    label: str | None = None


def write_features(path: str | Path, rows: list[FeatureRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{_VERSION_PREFIX}{FEATURE_SCHEMA_VERSION}\n")
        fh.write("\t".join(_META_COLUMNS + FEATURE_NAMES + _TRAIL_COLUMNS) + "\n")
        for row in rows:
            values = [row.snapshot_id, row.url]
            values += [_format_value(v) for v in row.vector.values()]
            values.append(row.vector.target_brand or "")
            values.append(row.label or "")
            fh.write("\t".join(values) + "\n")


def _format_value(v: float) -> str:
    if v == int(v):
        return str(int(v))
    return repr(v)


def read_features(path: str | Path) -> list[FeatureRow]:
    rows: list[FeatureRow] = []
    with open(path, encoding="utf-8") as fh:
        version_line = fh.readline().strip()
        if not version_line.startswith(_VERSION_PREFIX):
            raise CorpusError(f"{path}: missing feature schema version line")
        version = version_line[len(_VERSION_PREFIX):]
        if version != FEATURE_SCHEMA_VERSION:
            raise CorpusError(
                f"{path}: feature schema {version!r} unsupported "
                f"(expected {FEATURE_SCHEMA_VERSION!r})")
        header = fh.readline().strip().split("\t")
        expected = list(_META_COLUMNS + FEATURE_NAMES + _TRAIL_COLUMNS)
        if header != expected:
            raise CorpusError(f"{path}: unexpected header {header}")
        for lineno, line in enumerate(fh, start=3):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(expected):
                raise CorpusError(f"{path}: line {lineno}: bad column count")
            snap_id, url = parts[0], parts[1]
            raw = parts[2:2 + len(FEATURE_NAMES)]
            brand = parts[-2] or None
            label = parts[-1] or None
            try:
                kwargs = {}
                for name, value in zip(FEATURE_NAMES, raw):
                    kwargs[name] = float(value) if "." in value else int(value)
                vector = FeatureVector(target_brand=brand, **kwargs)
            except ValueError as exc:
                raise CorpusError(f"{path}: line {lineno}: {exc}") from exc
            rows.append(FeatureRow(snapshot_id=snap_id, url=url,
                                   vector=vector, label=label))
    return rows
