"""Classification metrics: top-k accuracy, balanced accuracy, class-mean AP.

Score ties are broken by the lowest class id (ranking) or lowest sample
index (per-class score lists), so every metric is deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError, UndefinedMetricError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalSample:
    scores: np.ndarray
    true_class: int


def _validate(samples) -> int:
    if not samples:
        raise UndefinedMetricError("no samples; metric undefined")
    n_classes = len(samples[0].scores)
    for s in samples:
        if len(s.scores) != n_classes:
            raise PreconditionError("all score vectors must have the catalog length")
    return n_classes


def top_k_accuracy(samples, k: int) -> float:
    """Fraction of samples whose true class ranks in the top k scores."""
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    _validate(samples)
    hits = 0
    for s in samples:
        order = np.argsort(-np.asarray(s.scores), kind="stable")  # ties: lowest class id
        if s.true_class in order[:k]:
            hits += 1
    return hits / len(samples)


def _argmax_lowest(scores) -> int:
    return int(np.argmax(scores))  # numpy argmax returns the first maximum


def balanced_accuracy(samples, excluded_out: list | None = None) -> float:
    """Unweighted mean of per-class recall at argmax.

    Classes absent from the ground truth are excluded; pass excluded_out to
    collect them.
    """
    n_classes = _validate(samples)
    correct = np.zeros(n_classes)
    support = np.zeros(n_classes)
    for s in samples:
        support[s.true_class] += 1
        if _argmax_lowest(s.scores) == s.true_class:
            correct[s.true_class] += 1
    present = support > 0
    if not present.any():
        raise UndefinedMetricError("no classes present in ground truth")
    absent = np.nonzero(~present)[0]
    if absent.size and excluded_out is not None:
        excluded_out.extend(int(c) for c in absent)
    if absent.size:
        log.debug("balanced_accuracy: %d classes absent from ground truth", absent.size)
    recalls = correct[present] / support[present]
    return float(recalls.mean())


def average_precision(relevance, n_positives: int | None = None) -> float | None:
    """All-points interpolated AP of a ranked 0/1 relevance sequence.

    Recall is measured against n_positives when given (detection use, where
    unmatched ground truth never enters the ranking), otherwise against the
    positives present in the sequence. None when there are no positives.
    """
    rel = np.asarray(relevance, dtype=np.float64)
    n_pos = rel.sum() if n_positives is None else float(n_positives)
    if n_pos == 0:
        return None
    if rel.size == 0 or rel.sum() == 0:
        return 0.0
    tp = np.cumsum(rel)
    precision = tp / np.arange(1, len(rel) + 1)
    recall = tp / n_pos
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    deltas = np.diff(np.concatenate(([0.0], recall)))
    return float(np.sum(deltas * envelope))


def class_mean_average_precision(samples, excluded_out: list | None = None) -> float:
    """One-vs-rest AP per class over the full ranking, averaged over classes.

    Classes with zero positives are excluded (collected via excluded_out).
    """
    n_classes = _validate(samples)
    scores = np.stack([np.asarray(s.scores, dtype=np.float64) for s in samples])
    truth = np.array([s.true_class for s in samples])
    aps = []
    excluded = []
    for c in range(n_classes):
        order = np.argsort(-scores[:, c], kind="stable")  # ties: lowest sample index
        ap = average_precision(truth[order] == c)
        if ap is None:
            excluded.append(c)
        else:
            aps.append(ap)
    if not aps:
        raise UndefinedMetricError("no class has a positive sample")
    if excluded and excluded_out is not None:
        excluded_out.extend(excluded)
    return float(np.mean(aps))
