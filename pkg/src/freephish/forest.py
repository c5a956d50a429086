"""From-scratch random forest: training, prediction, evaluation, persistence.

Trees are grown on seeded bootstrap samples with Gini-impurity splits over a
random feature subset per node; candidate thresholds are midpoints between
consecutive distinct sorted values (for binary features that reduces to the
single 0/1 midpoint). Per-tree seeds are derived from the forest seed, so
serial and parallel training produce bit-identical forests, and a persisted
model reloads to bit-identical predictions.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DatasetError, SchemaMismatchError
from .features import FEATURE_NAMES, FEATURE_SCHEMA_VERSION, FeatureVector
from .stats import _midranks

LABELS = ("benign", "phishing")
POSITIVE = "phishing"

MODEL_FORMAT = "freephish-forest"
MODEL_FORMAT_VERSION = 1


@dataclass
class LabeledDataset:
    rows: list[tuple[FeatureVector, str]]
    feature_schema_version: str = FEATURE_SCHEMA_VERSION

    def __post_init__(self):
        if not self.rows:
            raise DatasetError("dataset must be non-empty")
        for vector, label in self.rows:
            if label not in LABELS:
                raise DatasetError(f"unknown label {label!r}")
            if vector.schema_version != self.feature_schema_version:
                raise DatasetError(
                    f"row schema {vector.schema_version!r} != dataset schema "
                    f"{self.feature_schema_version!r}")

    def labels(self) -> list[str]:
        return [label for _, label in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    features_per_split: int | None = None  # None: ceil(sqrt(n_features))
    seed: int = 0
    decision_threshold: float = 0.5
    feature_subset: tuple[str, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "features_per_split": self.features_per_split,
            "seed": self.seed,
            "decision_threshold": self.decision_threshold,
            "feature_subset": list(self.feature_subset) if self.feature_subset else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestParams":
        subset = d.get("feature_subset")
        return cls(
            n_trees=d.get("n_trees", 100),
            max_depth=d.get("max_depth"),
            min_leaf=d.get("min_leaf", 1),
            features_per_split=d.get("features_per_split"),
            seed=d.get("seed", 0),
            decision_threshold=d.get("decision_threshold", 0.5),
            feature_subset=tuple(subset) if subset else None,
        )


@dataclass
class Forest:
    trees: list[dict]
    params: ForestParams
    feature_schema_version: str
    training_metadata: dict = field(default_factory=dict)

    @property
    def model_version(self) -> str:
        canonical = json.dumps(
            {"schema": self.feature_schema_version,
             "params": self.params.to_dict(), "trees": self.trees},
            sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class Verdict:
    label: str
    score: float
    model_version: str
    features: FeatureVector


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    per_class: dict[str, ClassMetrics]
    roc_auc: float | None
    confusion: dict[str, int]  # tp/fp/fn/tn with phishing as positive


def split_train_test(dataset: LabeledDataset, fraction: float,
                     seed: int) -> tuple[LabeledDataset, LabeledDataset]:
    """Stratified, seeded, exact split: per class, round(fraction*n) rows
    go to train and the remainder to test."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be strictly between 0 and 1")
    by_label: dict[str, list] = {}
    for row in dataset.rows:
        by_label.setdefault(row[1], []).append(row)
    rng = random.Random(seed)
    train_rows, test_rows = [], []
    for label in sorted(by_label):
        rows = list(by_label[label])
        rng.shuffle(rows)
        k = int(fraction * len(rows) + 0.5)
        train_rows.extend(rows[:k])
        test_rows.extend(rows[k:])
    if not train_rows or not test_rows:
        raise ValueError("fraction leaves an empty partition")
    return (LabeledDataset(train_rows, dataset.feature_schema_version),
            LabeledDataset(test_rows, dataset.feature_schema_version))


def _child_seed(seed: int, index: int) -> int:
    digest = hashlib.blake2b(f"{seed}/{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _gini(counts: dict[str, int], total: int) -> float:
    score = 0.0
    for c in counts.values():
        p = c / total
        score += p * p
    return 1.0 - score


def _leaf(labels: list[str], idx: list[int]) -> dict:
    counts = {}
    for i in idx:
        counts[labels[i]] = counts.get(labels[i], 0) + 1
    return {"counts": counts}


def _best_split(matrix: list[tuple[float, ...]], labels: list[str],
                idx: list[int], feature: int, min_leaf: int):
    """Sweep midpoints of sorted observed values; returns
    (weighted_gini, threshold) or None when no valid split exists."""
    pairs = sorted((matrix[i][feature], labels[i]) for i in idx)
    n = len(pairs)
    total_counts: dict[str, int] = {}
    for _, label in pairs:
        total_counts[label] = total_counts.get(label, 0) + 1
    left_counts: dict[str, int] = {}
    best = None
    i = 0
    while i < n - 1:
        # advance over a run of equal values
        value = pairs[i][0]
        while i < n and pairs[i][0] == value:
            left_counts[pairs[i][1]] = left_counts.get(pairs[i][1], 0) + 1
            i += 1
        if i >= n:
            break
        nl = i
        nr = n - nl
        if nl < min_leaf or nr < min_leaf:
            continue
        right_counts = {k: total_counts[k] - left_counts.get(k, 0)
                        for k in total_counts}
        weighted = (nl / n) * _gini(left_counts, nl) + (nr / n) * _gini(right_counts, nr)
        threshold = (value + pairs[i][0]) / 2.0
        if best is None or weighted < best[0]:
            best = (weighted, threshold)
    return best


def _grow(matrix, labels, idx, depth, params, n_features, candidates, rng) -> dict:
    counts: dict[str, int] = {}
    for i in idx:
        counts[labels[i]] = counts.get(labels[i], 0) + 1
    if (len(counts) == 1
            or (params.max_depth is not None and depth >= params.max_depth)
            or len(idx) < 2 * params.min_leaf):
        return {"counts": counts}
    k = params.features_per_split or math.ceil(math.sqrt(n_features))
    k = min(k, len(candidates))
    chosen = rng.sample(candidates, k)
    best = None  # (gini, feature, threshold)
    for feature in chosen:
        split = _best_split(matrix, labels, idx, feature, params.min_leaf)
        if split is not None and (best is None or split[0] < best[0]):
            best = (split[0], feature, split[1])
    if best is None:
        return {"counts": counts}
    _, feature, threshold = best
    left_idx = [i for i in idx if matrix[i][feature] <= threshold]
    right_idx = [i for i in idx if matrix[i][feature] > threshold]
    return {
        "f": feature,
        "t": threshold,
        "l": _grow(matrix, labels, left_idx, depth + 1, params, n_features,
                   candidates, rng),
        "r": _grow(matrix, labels, right_idx, depth + 1, params, n_features,
                   candidates, rng),
    }


def _build_tree(matrix, labels, params, n_features, candidates, seed) -> dict:
    rng = random.Random(seed)
    n = len(labels)
    bootstrap = [rng.randrange(n) for _ in range(n)]
    return _grow(matrix, labels, bootstrap, 0, params, n_features, candidates, rng)


def train_forest(train: LabeledDataset, params: ForestParams | None = None,
                 n_jobs: int = 1) -> Forest:
    """Grow the forest; n_jobs > 1 builds trees in threads with per-tree
    derived seeds, producing the identical forest as the serial path."""
    params = params or ForestParams()
    labels = train.labels()
    if len(set(labels)) < 2:
        raise DatasetError("training data must contain both classes")
    matrix = [vector.values() for vector, _ in train.rows]
    n_features = len(FEATURE_NAMES)
    if params.feature_subset:
        name_to_idx = {name: i for i, name in enumerate(FEATURE_NAMES)}
        unknown = [n for n in params.feature_subset if n not in name_to_idx]
        if unknown:
            raise SchemaMismatchError(f"unknown features in subset: {unknown}")
        candidates = [name_to_idx[n] for n in params.feature_subset]
    else:
        candidates = list(range(n_features))
    seeds = [_child_seed(params.seed, i) for i in range(params.n_trees)]
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(
                lambda s: _build_tree(matrix, labels, params, n_features,
                                      candidates, s), seeds))
    else:
        trees = [_build_tree(matrix, labels, params, n_features, candidates, s)
                 for s in seeds]
    return Forest(trees=trees, params=params,
                  feature_schema_version=train.feature_schema_version,
                  training_metadata={"n_rows": len(train),
                                     "class_counts": _class_counts(labels)})


def _class_counts(labels: list[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for label in labels:
        out[label] = out.get(label, 0) + 1
    return out


def _tree_vote(tree: dict, values: tuple[float, ...]) -> str:
    node = tree
    while "counts" not in node:
        node = node["l"] if values[node["f"]] <= node["t"] else node["r"]
    counts = node["counts"]
    # ties resolve to phishing: the cautious default for a safety tool
    best_label, best_count = None, -1
    for label in LABELS:
        c = counts.get(label, 0)
        if c > best_count or (c == best_count and label == POSITIVE):
            best_label, best_count = label, c
    return best_label


def score(forest: Forest, vector: FeatureVector) -> float:
    """Fraction of trees voting phishing."""
    if vector.schema_version != forest.feature_schema_version:
        raise SchemaMismatchError(
            f"vector schema {vector.schema_version!r} != model schema "
            f"{forest.feature_schema_version!r}")
    values = vector.values()
    votes = sum(1 for tree in forest.trees if _tree_vote(tree, values) == POSITIVE)
    return votes / len(forest.trees)


def predict(forest: Forest, vector: FeatureVector) -> Verdict:
    s = score(forest, vector)
    label = POSITIVE if s >= forest.params.decision_threshold else "benign"
    return Verdict(label=label, score=s, model_version=forest.model_version,
                   features=vector)


def roc_auc(scores: list[float], y_true: list[str]) -> float | None:
    """Rank-based AUC with midrank tie handling (Mann-Whitney form)."""
    n_pos = sum(1 for y in y_true if y == POSITIVE)
    n_neg = len(y_true) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = _midranks(list(scores))
    rank_sum = sum(r for r, y in zip(ranks, y_true) if y == POSITIVE)
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def compute_metrics(y_true: list[str], y_pred: list[str],
                    scores: list[float] | None = None) -> Metrics:
    if not y_true:
        raise ValueError("empty evaluation set")
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == POSITIVE and p == POSITIVE)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t != POSITIVE and p == POSITIVE)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == POSITIVE and p != POSITIVE)
    tn = sum(1 for t, p in zip(y_true, y_pred) if t != POSITIVE and p != POSITIVE)
    per_class = {
        POSITIVE: _class_metrics(tp, fp, fn),
        "benign": _class_metrics(tn, fn, fp),
    }
    auc = roc_auc(scores, y_true) if scores is not None else None
    return Metrics(
        accuracy=(tp + tn) / len(y_true),
        per_class=per_class,
        roc_auc=auc,
        confusion={"tp": tp, "fp": fp, "fn": fn, "tn": tn},
    )


def _class_metrics(tp: int, fp: int, fn: int) -> ClassMetrics:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return ClassMetrics(precision=precision, recall=recall, f1=f1)


def evaluate(forest: Forest, test: LabeledDataset) -> Metrics:
    y_true, y_pred, scores = [], [], []
    for vector, label in test.rows:
        verdict = predict(forest, vector)
        y_true.append(label)
        y_pred.append(verdict.label)
        scores.append(verdict.score)
    return compute_metrics(y_true, y_pred, scores)


def save_forest(forest: Forest, path: str | Path) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "feature_schema_version": forest.feature_schema_version,
        "model_version": forest.model_version,
        "params": forest.params.to_dict(),
        "training_metadata": forest.training_metadata,
        "trees": forest.trees,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_forest(path: str | Path) -> Forest:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise SchemaMismatchError(f"{path}: not a {MODEL_FORMAT} file")
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise SchemaMismatchError(
            f"{path}: unsupported format version {payload.get('format_version')}")
    forest = Forest(
        trees=payload["trees"],
        params=ForestParams.from_dict(payload["params"]),
        feature_schema_version=payload["feature_schema_version"],
        training_metadata=payload.get("training_metadata", {}),
    )
    stored = payload.get("model_version")
    if stored and stored != forest.model_version:
        raise SchemaMismatchError(
            f"{path}: model_version mismatch (file {stored}, "
            f"recomputed {forest.model_version})")
    return forest
