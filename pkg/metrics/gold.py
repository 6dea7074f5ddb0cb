"""Gold label layers a detector can be scored against."""

from enum import Enum

from corpus.exceptions import MissingLayerError
from corpus.schema import FaithStatus


class GoldLayer(str, Enum):
    SUBJECTIVITY = 'subjectivity'
    FAITHFULNESS = 'faithfulness'
    SUBJ_OR_UNFAITH = 'subj_or_unfaith'


def _unfaithful(claim):
    # ambiguous (tied) gold counts as not clearly faithful
    return claim.gold_faith in (FaithStatus.UNSUPPORTED, FaithStatus.AMBIGUOUS)


def gold_labels(corpus, layer, strict=False):
    """
    claim_id -> bool over in-scope claims for one gold layer.

    Claims lacking the layer are skipped, or raise MissingLayerError with
    `strict`.
    """
    layer = GoldLayer(layer)
    labels = {}
    missing = []
    for context in corpus.in_scope_contexts():
        claim = context.claim
        if layer == GoldLayer.SUBJECTIVITY:
            if claim.subjectivity is None:
                missing.append(claim.id)
                continue
            labels[claim.id] = claim.is_subjective
        elif layer == GoldLayer.FAITHFULNESS:
            if claim.gold_faith is None:
                missing.append(claim.id)
                continue
            labels[claim.id] = _unfaithful(claim)
        else:
            if claim.subjectivity is None or claim.gold_faith is None:
                missing.append(claim.id)
                continue
            labels[claim.id] = claim.is_subjective or _unfaithful(claim)

    if strict and missing:
        raise MissingLayerError(layer.value, missing)
    return labels
