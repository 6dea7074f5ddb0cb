"""
Detection scores: balanced accuracy and F1-macro over binary labels.

Positive means "flagged" (subjective, unfaithful, or either, depending on
the gold layer). Predictions and golds are claim_id -> bool maps; claims
missing from either side are left out and counted.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.metrics import balanced_accuracy_score, f1_score

from .exceptions import MetricError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise MetricError('Confusion counts must be non-negative')

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def positives(self):
        return self.tp + self.fn

    @property
    def negatives(self):
        return self.tn + self.fp

    def arrays(self):
        """Expand into aligned (golds, preds) 0/1 arrays."""
        golds = np.array([1] * self.tp + [1] * self.fn + [0] * self.tn + [0] * self.fp, dtype=int)
        preds = np.array([1] * self.tp + [0] * self.fn + [0] * self.tn + [1] * self.fp, dtype=int)
        return golds, preds

    @classmethod
    def from_labels(cls, preds, golds):
        preds = np.asarray(list(preds), dtype=bool)
        golds = np.asarray(list(golds), dtype=bool)
        if preds.shape != golds.shape:
            raise MetricError(f'{len(preds)} predictions for {len(golds)} gold labels')
        return cls(
            tp=int(np.sum(preds & golds)),
            fp=int(np.sum(preds & ~golds)),
            tn=int(np.sum(~preds & ~golds)),
            fn=int(np.sum(~preds & golds)),
        )

    def as_dict(self):
        return {'tp': self.tp, 'fp': self.fp, 'tn': self.tn, 'fn': self.fn}


def _as_arrays(preds, golds):
    if isinstance(preds, ConfusionCounts):
        golds_arr, preds_arr = preds.arrays()
        return preds_arr, golds_arr
    preds_arr = np.asarray(list(preds), dtype=int)
    golds_arr = np.asarray(list(golds), dtype=int)
    if preds_arr.shape != golds_arr.shape:
        raise MetricError(f'{len(preds_arr)} predictions for {len(golds_arr)} gold labels')
    return preds_arr, golds_arr


def _require_both_classes(golds):
    present = set(np.unique(golds).tolist())
    if present != {0, 1}:
        absent = 'positive' if 1 not in present else 'negative'
        raise MetricError(f'Gold labels contain no {absent} claims; score is undefined')


def balanced_accuracy(preds, golds=None):
    """Mean per-class recall, as a percent. Accepts labels or a ConfusionCounts."""
    preds_arr, golds_arr = _as_arrays(preds, golds)
    _require_both_classes(golds_arr)
    return 100.0 * float(balanced_accuracy_score(golds_arr, preds_arr))


def f1_macro(preds, golds=None):
    """Unweighted mean of the positive- and negative-class F1."""
    preds_arr, golds_arr = _as_arrays(preds, golds)
    _require_both_classes(golds_arr)
    return float(f1_score(golds_arr, preds_arr, average='macro', labels=[0, 1], zero_division=0))


@dataclass(frozen=True)
class DetectionScore:
    balanced_accuracy: float
    f1_macro: float
    counts: ConfusionCounts
    scored: int
    excluded: int

    def as_dict(self):
        return {
            'balanced_accuracy': round(self.balanced_accuracy, 4),
            'f1_macro': round(self.f1_macro, 4),
            'confusion': self.counts.as_dict(),
            'scored': self.scored,
            'excluded': self.excluded,
        }


def align(predictions, golds):
    """Intersect two claim_id -> bool maps; returns (preds, golds, excluded count)."""
    shared = sorted(set(predictions) & set(golds))
    excluded = len(set(golds) - set(predictions))
    return [predictions[claim_id] for claim_id in shared], [golds[claim_id] for claim_id in shared], excluded


def score_detection(predictions, golds, excluded=0):
    preds, gold_labels, missing = align(predictions, golds)
    counts = ConfusionCounts.from_labels(preds, gold_labels)
    return DetectionScore(
        balanced_accuracy=balanced_accuracy(preds, gold_labels),
        f1_macro=f1_macro(preds, gold_labels),
        counts=counts,
        scored=len(preds),
        excluded=excluded + missing,
    )
