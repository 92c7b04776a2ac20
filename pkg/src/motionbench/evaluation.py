"""Pixel-level scoring: confusion counting, the seven metrics, and ranking.

Scoring follows the public change-detection convention: shadow pixels count
as background truth, pixels labeled unknown or outside the region of
interest are excluded, and per-video metrics come from pixel counts pooled
over the whole evaluated range.  Ranks run from 1 (best); ties share the
mean of the tied positions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields
from typing import Iterable, Mapping

import numpy as np
from scipy.stats import rankdata

from .frames import ForegroundMask

log = logging.getLogger(__name__)

# ground-truth gray codes
GT_BACKGROUND = 0
GT_SHADOW = 50
GT_OUTSIDE_ROI = 85
GT_UNKNOWN = 170
GT_FOREGROUND = 255
GT_CODES = (GT_BACKGROUND, GT_SHADOW, GT_OUTSIDE_ROI, GT_UNKNOWN, GT_FOREGROUND)

# (field, CSV column, higher is better)
METRIC_COLUMNS = (
    ("recall", "Recall", True),
    ("specificity", "Specificity", True),
    ("fpr", "FPR", False),
    ("fnr", "FNR", False),
    ("pwc", "PWC", False),
    ("precision", "Precision", True),
    ("f1", "F-Measure", True),
)


@dataclass
class ConfusionCounts:
    """TP/FP/TN/FN pixel totals; merging is fieldwise addition."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.tn + other.tn,
            self.fn + other.fn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class MetricVector:
    """The seven benchmark metrics; PWC is a percentage, the rest fractions.

    ``defined`` is False when the counts cannot support the vector (no
    evaluated pixels, or one truth class entirely absent); such vectors are
    skipped by the aggregation with a logged warning.
    """

    recall: float
    specificity: float
    fpr: float
    fnr: float
    pwc: float
    precision: float
    f1: float
    defined: bool = True

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "defined"}

    @classmethod
    def undefined(cls) -> "MetricVector":
        nan = float("nan")
        return cls(nan, nan, nan, nan, nan, nan, nan, defined=False)


def accumulate(
    counts: ConfusionCounts,
    predicted: ForegroundMask,
    truth: np.ndarray,
    roi: np.ndarray | None = None,
) -> ConfusionCounts:
    """Add one frame's contingency to ``counts``.

    ``truth`` holds the raw ground-truth codes.  Unknown and outside-ROI
    pixels are skipped, shadow counts as background truth, and an optional
    spatial ROI mask restricts scoring further.
    """
    codes = np.asarray(truth)
    if codes.shape != predicted.shape:
        raise ValueError(
            f"mask shape {predicted.shape} does not match ground truth {codes.shape}"
        )
    valid = (codes != GT_OUTSIDE_ROI) & (codes != GT_UNKNOWN)
    if roi is not None:
        if roi.shape != codes.shape:
            raise ValueError("spatial ROI shape does not match the frame")
        valid &= np.asarray(roi).astype(bool)
    positive = codes == GT_FOREGROUND
    pred = predicted.labels.astype(bool)
    frame = ConfusionCounts(
        tp=int((pred & positive & valid).sum()),
        fp=int((pred & ~positive & valid).sum()),
        tn=int((~pred & ~positive & valid).sum()),
        fn=int((~pred & positive & valid).sum()),
    )
    return counts + frame


def metrics(counts: ConfusionCounts) -> MetricVector:
    """The seven metrics for one pooled set of counts.

    Zero-denominator policy: precision and F-measure are 0 when nothing was
    detected; the whole vector is undefined when no pixels were evaluated
    or the truth lacks one of the two classes.
    """
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    if counts.total == 0 or tp + fn == 0 or tn + fp == 0:
        log.warning("metrics undefined for counts %s", counts)
        return MetricVector.undefined()
    recall = tp / (tp + fn)
    specificity = tn / (tn + fp)
    fpr = fp / (fp + tn)
    fnr = fn / (fn + tp)
    pwc = 100.0 * (fn + fp) / counts.total
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricVector(recall, specificity, fpr, fnr, pwc, precision, f1)


def _mean_vector(vectors: Iterable[MetricVector], context: str) -> MetricVector:
    usable = []
    for vec in vectors:
        if vec.defined:
            usable.append(vec)
        else:
            log.warning("skipping undefined metric vector in %s", context)
    if not usable:
        raise ValueError(f"no defined metric vectors in {context}")
    return MetricVector(
        **{
            name: float(np.mean([getattr(v, name) for v in usable]))
            for name, _, _ in METRIC_COLUMNS
        }
    )


def category_average(per_video: Iterable[MetricVector]) -> MetricVector:
    """Unweighted per-metric mean over the videos of one category."""
    vectors = list(per_video)
    if not vectors:
        raise ValueError("cannot average an empty category")
    return _mean_vector(vectors, "category average")


def overall_average(per_category: Mapping[str, MetricVector]) -> MetricVector:
    """Unweighted mean of the category averages (all categories required)."""
    if not per_category:
        raise ValueError("cannot average zero categories")
    missing = [name for name, vec in per_category.items() if vec is None]
    if missing:
        raise ValueError(f"missing category averages: {missing}")
    return _mean_vector(per_category.values(), "overall average")


def rank_methods(scores: Mapping[str, MetricVector]) -> dict[str, dict[str, float]]:
    """Per-metric ranks for each method, 1 = best, ties share mean position."""
    if len(scores) < 2:
        raise ValueError("ranking needs at least two methods")
    methods = list(scores)
    ranks: dict[str, dict[str, float]] = {m: {} for m in methods}
    for name, _, higher_better in METRIC_COLUMNS:
        values = np.array([getattr(scores[m], name) for m in methods], dtype=np.float64)
        if np.isnan(values).any():
            raise ValueError(f"cannot rank undefined values for metric {name}")
        column = rankdata(-values if higher_better else values, method="average")
        for m, r in zip(methods, column):
            ranks[m][name] = float(r)
    return ranks


def average_rank(scores: Mapping[str, MetricVector]) -> dict[str, float]:
    """Mean rank over the seven metrics for each method."""
    ranks = rank_methods(scores)
    return {m: float(np.mean(list(per_metric.values()))) for m, per_metric in ranks.items()}


@dataclass
class ScoreTable:
    """Benchmark aggregation: videos, categories, overall, and rank levels."""

    per_video: dict[tuple[str, str, str], MetricVector]  # (method, category, video)
    per_category: dict[tuple[str, str], MetricVector]  # (method, category)
    overall: dict[str, MetricVector]  # method -> mean of category averages
    category_rank: dict[tuple[str, str], float]  # mean rank inside a category
    across_rank: dict[str, float]  # mean of the category ranks
    overall_rank: dict[str, float]  # mean rank over the overall metrics

    def categories(self) -> list[str]:
        return sorted({cat for _, cat in self.per_category})

    def methods(self) -> list[str]:
        return sorted({m for m, _ in self.per_category})


def assemble_score_table(
    per_video: Mapping[tuple[str, str, str], MetricVector],
) -> ScoreTable:
    """Aggregate per-video vectors into category, overall, and rank levels.

    Rank columns are filled only when at least two methods are present.
    """
    methods = sorted({key[0] for key in per_video})
    categories = sorted({key[1] for key in per_video})

    per_category: dict[tuple[str, str], MetricVector] = {}
    for method in methods:
        for category in categories:
            vectors = [
                vec
                for (m, c, _), vec in sorted(per_video.items())
                if m == method and c == category
            ]
            if not vectors:
                continue
            try:
                per_category[(method, category)] = category_average(vectors)
            except ValueError:
                log.warning("no defined scores for %s in %s; category skipped", method, category)

    overall: dict[str, MetricVector] = {}
    for method in methods:
        rows = {c: per_category[(method, c)] for c in categories if (method, c) in per_category}
        if len(rows) == len(categories):
            overall[method] = overall_average(rows)

    category_rank: dict[tuple[str, str], float] = {}
    across_rank: dict[str, float] = {}
    overall_rank: dict[str, float] = {}
    if len(methods) >= 2:
        for category in categories:
            scores = {
                m: per_category[(m, category)]
                for m in methods
                if (m, category) in per_category
            }
            if len(scores) >= 2:
                for m, r in average_rank(scores).items():
                    category_rank[(m, category)] = r
        counts = {m: [category_rank[(m, c)] for c in categories if (m, c) in category_rank] for m in methods}
        for m, values in counts.items():
            if values:
                across_rank[m] = float(np.mean(values))
        if len(overall) >= 2:
            overall_rank = average_rank(overall)
    return ScoreTable(dict(per_video), per_category, overall, category_rank, across_rank, overall_rank)
