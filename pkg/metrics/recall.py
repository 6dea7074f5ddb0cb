"""Detection recall broken down by ambiguity type."""

import logging

import numpy as np

from corpus.schema import ANALYZED_AMBIGUITY_TYPES

logger = logging.getLogger(__name__)


def recall_by_type(predictions, golds, types):
    """
    Recall of positive predictions among gold-positive claims of each type.

    `types` maps claim_id -> ambiguity type; types outside 1-4 are ignored.
    Empty buckets are omitted (and logged). Claims with no prediction
    (failed calls) are left out of their bucket.
    """
    buckets = {code: [] for code in ANALYZED_AMBIGUITY_TYPES}
    for claim_id, gold in golds.items():
        if not gold or claim_id not in predictions:
            continue
        code = types.get(claim_id)
        if code in buckets:
            buckets[code].append(bool(predictions[claim_id]))

    recalls = {}
    for code, hits in buckets.items():
        if not hits:
            logger.info('No gold-positive claims of type %s; omitted from recall', code)
            continue
        recalls[code] = float(np.mean(hits))
    return recalls


def mean_recall_by_type(recall_maps):
    """Average several per-type recall maps (e.g. one per prompt variant)."""
    collected = {}
    for recalls in recall_maps:
        for code, value in recalls.items():
            collected.setdefault(code, []).append(value)
    return {code: float(np.mean(values)) for code, values in sorted(collected.items())}
