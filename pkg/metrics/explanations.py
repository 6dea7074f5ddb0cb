"""
Explanation quality metrics.

Each rewrite has a list of explanation points; annotators label every point
IMPORTANT, NEUTRAL or WRONG. Over a set R of labeled explanations:

- %important:      macro average over R of the fraction of IMPORTANT points
- %none important: percent of explanations with no IMPORTANT point at all
- %wrong / %none wrong: the same two with WRONG in place of IMPORTANT
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .exceptions import MetricError


class PointLabel(str, Enum):
    IMPORTANT = 'important'
    NEUTRAL = 'neutral'
    WRONG = 'wrong'


def parse_point_label(value):
    try:
        return PointLabel(str(value).strip().lower())
    except ValueError as exc:
        raise MetricError(f'Unknown explanation label "{value}"') from exc


class AggregationMode(str, Enum):
    INDIVIDUAL = 'individual'
    MAJORITY_VOTE = 'majority_vote'


@dataclass(frozen=True)
class ExplanationLabelSet:
    """Labels for one explanation; `labels` holds one label per kept point."""

    rewrite_id: str
    labels: tuple
    annotator_id: str | None = None


@dataclass(frozen=True)
class AnnotatedExplanation:
    """One rewrite's explanation as annotated: per-annotator label lists."""

    rewrite_id: str
    points: tuple
    annotations: dict
    decoys: tuple = ()

    def __post_init__(self):
        for annotator_id, labels in self.annotations.items():
            if len(labels) != len(self.points):
                raise MetricError(
                    f'{self.rewrite_id}: annotator {annotator_id} gave {len(labels)} labels '
                    f'for {len(self.points)} points'
                )

    def kept_indices(self):
        return [index for index in range(len(self.points)) if index not in self.decoys]


def _fraction(labels, target):
    if not labels:
        raise MetricError('Explanation with no points; fraction is undefined')
    return sum(1 for label in labels if label == target) / len(labels)


def _check(explanations):
    explanations = list(explanations)
    if not explanations:
        raise MetricError('No explanations to score')
    return explanations


def _labels(item):
    return item.labels if isinstance(item, ExplanationLabelSet) else tuple(item)


def pct_label(explanations, target):
    explanations = _check(explanations)
    total = sum(_fraction(_labels(item), target) for item in explanations)
    return 100.0 * total / len(explanations)


def pct_none_label(explanations, target):
    explanations = _check(explanations)
    none = 0
    for item in explanations:
        labels = _labels(item)
        if not labels:
            raise MetricError('Explanation with no points; fraction is undefined')
        if target not in labels:
            none += 1
    return 100.0 * none / len(explanations)


def pct_important(explanations):
    return pct_label(explanations, PointLabel.IMPORTANT)


def pct_none_important(explanations):
    return pct_none_label(explanations, PointLabel.IMPORTANT)


def pct_wrong(explanations):
    return pct_label(explanations, PointLabel.WRONG)


def pct_none_wrong(explanations):
    return pct_none_label(explanations, PointLabel.WRONG)


def explanation_metrics(explanations):
    explanations = _check(explanations)
    return {
        'pct_important': pct_important(explanations),
        'pct_none_important': pct_none_important(explanations),
        'pct_wrong': pct_wrong(explanations),
        'pct_none_wrong': pct_none_wrong(explanations),
    }


def majority_label(labels):
    """Modal label; a tie between the top labels resolves to NEUTRAL."""
    ranked = Counter(labels).most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return PointLabel.NEUTRAL
    return ranked[0][0]


def aggregate_explanation_labels(annotated, mode=AggregationMode.INDIVIDUAL):
    """
    Turn one annotated explanation into label sets for scoring.

    Individual mode returns one set per annotator (each is its own datum);
    majority mode returns a single set with the modal label per point.
    Decoy points are dropped in both modes.
    """
    mode = AggregationMode(mode)
    kept = annotated.kept_indices()

    if mode == AggregationMode.INDIVIDUAL:
        return [
            ExplanationLabelSet(
                rewrite_id=annotated.rewrite_id,
                labels=tuple(labels[index] for index in kept),
                annotator_id=annotator_id,
            )
            for annotator_id, labels in sorted(annotated.annotations.items())
        ]

    if len(annotated.annotations) < 3:
        raise MetricError(
            f'{annotated.rewrite_id}: majority vote needs 3 annotators, '
            f'got {len(annotated.annotations)}'
        )
    per_annotator = [annotated.annotations[key] for key in sorted(annotated.annotations)]
    labels = tuple(majority_label([labels[index] for labels in per_annotator]) for index in kept)
    return [ExplanationLabelSet(rewrite_id=annotated.rewrite_id, labels=labels)]


def explanation_table(annotated_explanations):
    """%important / %none important / %wrong / %none wrong for both aggregation modes."""
    table = {}
    for mode in AggregationMode:
        sets = []
        for annotated in annotated_explanations:
            sets.extend(aggregate_explanation_labels(annotated, mode))
        table[mode.value] = explanation_metrics(sets)
    return table
