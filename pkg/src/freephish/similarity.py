"""Tag-level website code similarity.

Pages built from the same hosting template share most of their markup, so
similarity is computed over element start tags (attributes included: class
names and ids are where template fingerprints live). For each tag of page A
the best normalized edit-distance match in page B is found; the A-to-B score
is the median of those maxima, and the overall score is the mean of both
directions. Similarity between two tags t, u is 1 - LV(t,u)/max(|t|,|u|);
that normalization is this module's convention, and it determines all
absolute score values.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass

from .errors import UndefinedSimilarityError
from .htmlscan import normalize_start_tag, scan_page

DEFAULT_TAG_CAP = 5000


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert/delete/substitute)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class TagSequence:
    """Normalized element start tags in document order."""

    tags: tuple[str, ...]

    def __post_init__(self):
        for t in self.tags:
            if not (t.startswith("<") and t.endswith(">")):
                raise ValueError(f"not a normalized start tag: {t!r}")

    def __len__(self) -> int:
        return len(self.tags)


@dataclass(frozen=True)
class SimilarityResult:
    sim_a_to_b: float
    sim_b_to_a: float
    overall: float
    per_tag_max: tuple[float, ...]
    approximate: bool = False


def extract_tags(body: str) -> TagSequence:
    """All element start tags of a page, normalized, in document order."""
    scan = scan_page(body)
    return TagSequence(tags=tuple(
        normalize_start_tag(name, attrs) for name, attrs in scan.tags))


def tag_similarity(t: str, u: str) -> float:
    """1 - LV/max(len); 1.0 for identical tags."""
    if t == u:
        return 1.0
    longest = max(len(t), len(u))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(t, u) / longest


def directional_similarity(a: TagSequence, b: TagSequence) -> tuple[float, list[float]]:
    """Median of per-tag best-match similarities from a into b.

    Empty ``a`` is undefined; empty ``b`` scores 0 for every tag of ``a``.
    """
    if len(a) == 0:
        raise UndefinedSimilarityError("source tag sequence is empty")
    if len(b) == 0:
        zeros = [0.0] * len(a)
        return 0.0, zeros
    unique_b = list(dict.fromkeys(b.tags))
    best: dict[str, float] = {}
    per_tag: list[float] = []
    for t in a.tags:
        if t not in best:
            if t in unique_b:
                best[t] = 1.0
            else:
                best[t] = max(tag_similarity(t, u) for u in unique_b)
        per_tag.append(best[t])
    return float(statistics.median(per_tag)), per_tag


def _sample(seq: TagSequence, cap: int, rng: random.Random) -> TagSequence:
    idx = sorted(rng.sample(range(len(seq)), cap))
    return TagSequence(tags=tuple(seq.tags[i] for i in idx))


def site_similarity(a: TagSequence, b: TagSequence,
                    cap: int = DEFAULT_TAG_CAP, seed: int = 0) -> SimilarityResult:
    """Bidirectional page similarity: mean of the two directional medians.

    Sequences longer than ``cap`` are uniformly subsampled with a seeded
    generator and the result flagged approximate.
    """
    if len(a) == 0 or len(b) == 0:
        raise UndefinedSimilarityError("both tag sequences must be non-empty")
    approximate = False
    if len(a) > cap or len(b) > cap:
        rng = random.Random(seed)
        if len(a) > cap:
            a = _sample(a, cap, rng)
        if len(b) > cap:
            b = _sample(b, cap, rng)
        approximate = True
    sim_ab, per_tag = directional_similarity(a, b)
    sim_ba, _ = directional_similarity(b, a)
    return SimilarityResult(
        sim_a_to_b=sim_ab,
        sim_b_to_a=sim_ba,
        overall=(sim_ab + sim_ba) / 2.0,
        per_tag_max=tuple(per_tag),
        approximate=approximate,
    )


def compare_pages(body_a: str, body_b: str,
                  cap: int = DEFAULT_TAG_CAP, seed: int = 0) -> SimilarityResult:
    """Convenience wrapper: extract tags from two HTML bodies and compare."""
    return site_similarity(extract_tags(body_a), extract_tags(body_b),
                           cap=cap, seed=seed)
