"""
Annotator agreement and the per-claim outcomes used in the human studies.

A study item is one claim shown to k annotators (k = 3 by default) with
their faithfulness labels and, for rewrite studies, whether this variant
was preferred over the other.
"""

from dataclasses import dataclass
from enum import Enum

from corpus.schema import FaithStatus, parse_faith_status

from .exceptions import MetricError

DEFAULT_ANNOTATORS = 3


@dataclass(frozen=True)
class StudyItem:
    claim_id: str
    labels: tuple
    preferred: bool | None = None


class Outcome(str, Enum):
    AGREEMENT = 'agreement'
    FAITHFUL = 'faithful'
    PREFERRED = 'preferred'


def _check_label_counts(items, k):
    wrong = [item.claim_id for item in items if len(item.labels) != k]
    if wrong:
        preview = ', '.join(wrong[:10])
        raise MetricError(f'Claims without exactly {k} labels: {preview}')


def _statuses(item):
    statuses = []
    for label in item.labels:
        status = parse_faith_status(label)
        if status is None:
            raise MetricError(f'Unknown faithfulness label "{label}" for claim {item.claim_id}')
        statuses.append(status)
    return statuses


def unanimous(item):
    return len(set(_statuses(item))) == 1


def faithful_majority(item):
    """At least two annotators call the claim faithful."""
    return sum(1 for status in _statuses(item) if status == FaithStatus.SUPPORTED) >= 2


def agreement_rate(items, k=DEFAULT_ANNOTATORS):
    """Percent of claims on which all k annotators give the same label."""
    items = list(items)
    if not items:
        raise MetricError('No claims to compute agreement over')
    _check_label_counts(items, k)
    return 100.0 * sum(1 for item in items if unanimous(item)) / len(items)


def outcomes(items, outcome, k=DEFAULT_ANNOTATORS):
    """Binary per-claim outcomes (for rates and bootstrap tests)."""
    outcome = Outcome(outcome)
    items = list(items)
    if outcome == Outcome.PREFERRED:
        missing = [item.claim_id for item in items if item.preferred is None]
        if missing:
            raise MetricError(f'No preference recorded for: {", ".join(missing[:10])}')
        return [bool(item.preferred) for item in items]

    _check_label_counts(items, k)
    if outcome == Outcome.AGREEMENT:
        return [unanimous(item) for item in items]
    return [faithful_majority(item) for item in items]


def outcome_rate(values):
    values = list(values)
    if not values:
        raise MetricError('No outcomes to average')
    return 100.0 * sum(1 for value in values if value) / len(values)
