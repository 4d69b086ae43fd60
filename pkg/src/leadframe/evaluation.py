"""Entity-level evaluation and the lead-time / accuracy tradeoff sweep.

Splitting is by entity, never by row, so no entity contributes to both
training and testing.  The sweep reuses one split across every lead time;
the only thing that varies between curve points is where the reference
frame is planted.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .errors import DimensionMismatch, InvalidConfig, TooFewEntities
from .model import LogisticModel, TrainConfig, predict_proba, train_logistic
from .panel import EntityTimeline
from .rng import SplitMix64
from .transform import (
    AggregationPlan,
    EmptyWindowPolicy,
    ReferenceFrameConfig,
    TrainingSet,
    build_training_set,
)


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    auc: float
    tp: int
    fp: int
    tn: int
    fn: int
    threshold: float
    flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class CurvePoint:
    lead_time: int
    metrics: Metrics | None
    train_size: int
    test_size: int
    flags: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class TradeoffCurve:
    points: tuple[CurvePoint, ...]


def _rank_auc(scores: list[float], labels: list[int]) -> tuple[float, bool]:
    """Pairwise-ranking AUC via midranks; ties between classes count 0.5.

    Returns (auc, degenerate); degenerate means a class was absent and the
    conventional 0.5 was substituted.
    """
    n = len(scores)
    n_pos = sum(labels)
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        return 0.5, True
    order = sorted(range(n), key=lambda i: scores[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        midrank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = midrank
        i = j + 1
    rank_sum = sum(ranks[i] for i in range(n) if labels[i] == 1)
    auc = (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
    return auc, False


def evaluate(model: LogisticModel, test: TrainingSet, threshold: float = 0.5) -> Metrics:
    """Confusion counts at the threshold plus ranking AUC on a test set.

    Precision and recall fall back to 0 when undefined; AUC falls back to
    0.5 (flagged) when the test set holds a single class.
    """
    if test.feature_names != model.feature_names:
        raise DimensionMismatch(
            f"test features {test.feature_names!r} do not match model "
            f"features {model.feature_names!r}"
        )
    if not test.rows:
        raise DimensionMismatch("cannot evaluate on an empty test set")

    scores = [predict_proba(model, vector) for vector, _ in test.rows]
    labels = [label for _, label in test.rows]

    tp = fp = tn = fn = 0
    for score, label in zip(scores, labels):
        predicted = score >= threshold
        if predicted and label == 1:
            tp += 1
        elif predicted and label == 0:
            fp += 1
        elif not predicted and label == 0:
            tn += 1
        else:
            fn += 1

    total = tp + fp + tn + fn
    accuracy = (tp + tn) / total
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    auc, degenerate = _rank_auc(scores, labels)
    flags = ("single_class",) if degenerate else ()
    return Metrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        auc=auc,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        threshold=threshold,
        flags=flags,
    )


def split_entities(
    timelines: tuple[EntityTimeline, ...] | list[EntityTimeline],
    test_fraction: float,
    seed: int,
) -> tuple[tuple[EntityTimeline, ...], tuple[EntityTimeline, ...]]:
    """Disjoint seeded train/test split over entity ids.

    Entity ids are shuffled with the portable generator and cut at
    floor(n * test_fraction), clamped so both sides keep at least one
    entity.  Identical inputs always produce the identical split.
    """
    if not 0.0 < test_fraction < 1.0:
        raise InvalidConfig("test_fraction must lie strictly between 0 and 1")
    ordered = sorted(timelines, key=lambda t: t.entity_id)
    n = len(ordered)
    if n < 2:
        raise TooFewEntities(f"need at least 2 entities to split, have {n}")

    ids = [t.entity_id for t in ordered]
    SplitMix64(seed).shuffle(ids)
    # floor of the real-valued product; the epsilon absorbs binary float
    # error so e.g. 10 * 0.3 lands on 3, not 2.
    n_test = int(math.floor(n * test_fraction + 1e-9))
    n_test = min(max(n_test, 1), n - 1)
    test_ids = set(ids[:n_test])

    train = tuple(t for t in ordered if t.entity_id not in test_ids)
    test = tuple(t for t in ordered if t.entity_id in test_ids)
    return train, test


def lead_time_sweep(
    timelines: tuple[EntityTimeline, ...] | list[EntityTimeline],
    plan: AggregationPlan,
    lead_times: list[int] | tuple[int, ...],
    train_config: TrainConfig,
    test_fraction: float,
    seed: int,
    threshold: float = 0.5,
    empty_window_policy: EmptyWindowPolicy = EmptyWindowPolicy.DROP,
) -> TradeoffCurve:
    """Measure test metrics at each lead time over one shared entity split.

    A lead time that leaves the training side without both classes (or the
    test side empty) yields a point with absent metrics and an explanatory
    flag instead of failing the sweep.
    """
    if not lead_times:
        raise InvalidConfig("lead_times must be non-empty")
    if any(not isinstance(t, int) or t < 0 for t in lead_times):
        raise InvalidConfig("lead times must be non-negative integers")

    train_timelines, test_timelines = split_entities(timelines, test_fraction, seed)
    points = []
    for lead_time in sorted(set(lead_times)):
        config = ReferenceFrameConfig(
            lead_time=lead_time, empty_window_policy=empty_window_policy
        )
        train_set = build_training_set(train_timelines, config, plan)
        test_set = build_training_set(test_timelines, config, plan)

        flags = []
        train_labels = {label for _, label in train_set.rows}
        if 1 not in train_labels:
            flags.append("no_events_retained")
        if 0 not in train_labels:
            flags.append("no_nonevents_retained")
        if not test_set.rows:
            flags.append("empty_test_set")

        if flags:
            metrics = None
        else:
            fitted = train_logistic(train_set, train_config)
            metrics = evaluate(fitted, test_set, threshold)
        points.append(
            CurvePoint(
                lead_time=lead_time,
                metrics=metrics,
                train_size=len(train_set.rows),
                test_size=len(test_set.rows),
                flags=tuple(flags),
            )
        )
    return TradeoffCurve(points=tuple(points))


def write_curve_csv(curve: TradeoffCurve, stream: io.TextIOBase) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        ("lead_time", "accuracy", "precision", "recall", "auc", "train_size", "test_size", "flags")
    )
    for point in curve.points:
        merged = list(point.flags)
        if point.metrics is None:
            cells = ["", "", "", ""]
        else:
            m = point.metrics
            cells = [repr(m.accuracy), repr(m.precision), repr(m.recall), repr(m.auc)]
            merged.extend(m.flags)
        writer.writerow(
            (str(point.lead_time), *cells, str(point.train_size), str(point.test_size), "|".join(merged))
        )
