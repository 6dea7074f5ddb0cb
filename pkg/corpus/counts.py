"""Label breakdowns over a corpus (faithfulness x subjectivity, ambiguity types)."""

from dataclasses import dataclass
from enum import Enum

from .exceptions import MissingLayerError
from .schema import ANALYZED_AMBIGUITY_TYPES, FaithStatus, Subjectivity


class CountAxis(str, Enum):
    FAITH_SUBJECTIVITY = 'faith_subjectivity'
    AMBIGUITY_TYPE = 'ambiguity_type'


FAITH_BUCKETS = {
    FaithStatus.SUPPORTED: 'faithful',
    FaithStatus.UNSUPPORTED: 'unfaithful',
    # tied annotators count as not clearly faithful, as in metrics.gold
    FaithStatus.AMBIGUOUS: 'unfaithful',
}


@dataclass(frozen=True)
class CountTable:
    axis: CountAxis
    cells: dict
    labeled: int
    missing: tuple = ()

    @property
    def total(self):
        return sum(self.cells.values())

    def rows(self):
        return [(key, count) for key, count in self.cells.items()]


def _faith_subjectivity(corpus):
    cells = {}
    for bucket in ('faithful', 'unfaithful'):
        for subjectivity in Subjectivity:
            cells[f'{bucket}/{subjectivity.value}'] = 0

    missing = []
    labeled = 0
    for claim in corpus.claims:
        gold = claim.gold_faith
        # N/A commentary sits outside this breakdown
        if gold == FaithStatus.NOT_APPLICABLE:
            continue
        if gold is None or claim.subjectivity is None:
            missing.append(claim.id)
            continue
        key = f'{FAITH_BUCKETS[gold]}/{claim.subjectivity.value}'
        cells[key] = cells.get(key, 0) + 1
        labeled += 1
    return cells, labeled, missing


def _ambiguity_types(corpus):
    cells = {str(code): 0 for code in ANALYZED_AMBIGUITY_TYPES}
    missing = []
    labeled = 0
    for claim in corpus.claims:
        if claim.subjectivity != Subjectivity.SUBJECTIVE:
            continue
        if claim.ambiguity_type is None:
            missing.append(claim.id)
            continue
        key = str(claim.ambiguity_type)
        cells[key] = cells.get(key, 0) + 1
        labeled += 1
    return cells, labeled, missing


def count_labels(corpus, axis, strict=True):
    """
    Count claims along one label layer.

    With `strict`, any claim lacking the layer raises MissingLayerError;
    otherwise the unlabeled claim ids are returned in `missing` and left out
    of the counts.
    """
    axis = CountAxis(axis)
    if axis == CountAxis.FAITH_SUBJECTIVITY:
        cells, labeled, missing = _faith_subjectivity(corpus)
    else:
        cells, labeled, missing = _ambiguity_types(corpus)

    if strict and missing:
        raise MissingLayerError(axis.value, missing)

    return CountTable(axis=axis, cells=cells, labeled=labeled, missing=tuple(missing))
