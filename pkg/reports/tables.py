"""
Per-claim result records and the report tables built from them.

Rewrite runs and baseline runs share one record layout; `method` tells
them apart and `flagged` is the detection label in both.
"""

import json
import logging
import os

from corpus.exceptions import CorpusError
from metrics.exceptions import MetricError
from metrics.gold import GoldLayer, gold_labels
from metrics.recall import mean_recall_by_type, recall_by_type
from metrics.scores import score_detection

from .writers import ReportTable

logger = logging.getLogger(__name__)

DETECTION_COLUMNS = ('method', 'model', 'balanced_accuracy', 'f1_macro', 'scored', 'excluded')
PROMPT_COLUMNS = ('method', 'model', 'subj', 'unfaith', 'subj_or_unfaith', 'rewrites', 'avg_edit_distance')
RECALL_COLUMNS = ('method', 'type_1', 'type_2', 'type_3', 'type_4')


def failure_record(method, failure):
    return {
        'claim_id': failure.claim_id,
        'method': method,
        'status': failure.stage,
        'message': failure.message,
        'in_scope': failure.in_scope,
        'flagged': None,
        'raw_responses': list(failure.raw_responses),
    }


def arm_records(run):
    records = []
    for result in run.results:
        records.append({
            'claim_id': result.claim_id,
            'method': run.method,
            'status': 'ok',
            'in_scope': result.in_scope,
            'flagged': result.rewritten,
            'original_text': result.original_text,
            'rewrite_text': result.rewrite_text,
            'rewritten': result.rewritten,
            'edit_distance': result.edit_distance,
            'normalized_edit_distance': result.normalized_edit_distance,
            'explanation_points': list(result.explanation_points),
            'explanation_failed': result.explanation_failed,
            'raw_responses': list(result.raw_responses),
        })
    records.extend(failure_record(run.method, failure) for failure in run.failures)
    return sorted(records, key=lambda record: record['claim_id'])


def baseline_records(run):
    records = []
    for prediction in run.predictions:
        records.append({
            'claim_id': prediction.claim_id,
            'method': run.method.name,
            'status': 'ok',
            'in_scope': prediction.in_scope,
            'flagged': prediction.flagged,
            'answers': list(prediction.answers),
            'tie': prediction.tie,
            'raw_responses': list(prediction.raw_responses),
        })
    records.extend(failure_record(run.method.name, failure) for failure in run.failures)
    return sorted(records, key=lambda record: record['claim_id'])


def outcome_rows(records):
    """ClaimOutcome field dicts from result records."""
    rows = []
    for record in records:
        rows.append({
            'claim_id': record['claim_id'],
            'flagged': record.get('flagged'),
            'rewrite_text': record.get('rewrite_text') or '',
            'edit_distance': record.get('edit_distance'),
            'normalized_edit_distance': record.get('normalized_edit_distance'),
            'explanation_size': len(record['explanation_points']) if 'explanation_points' in record else None,
            'status': record['status'],
            'in_scope': record['in_scope'],
        })
    return rows


# ---------------------------------------------------------------------

def predictions_from_records(records):
    """(claim_id -> flagged for scored claims, in-scope failure count)."""
    predictions = {}
    failures = 0
    for record in records:
        if not record.get('in_scope', True):
            continue
        if record['status'] == 'ok':
            predictions[record['claim_id']] = bool(record['flagged'])
        else:
            failures += 1
    return predictions, failures


def load_results(path):
    if not os.path.exists(path):
        raise CorpusError(f'Results file not found: {path}')
    with open(path, 'r', encoding='utf-8') as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as exc:
            raise CorpusError(f'Invalid JSON in {path}: {exc}') from exc
    if 'records' not in document:
        raise CorpusError(f'{path} is not a results file')
    return document


def layer_score(corpus, predictions, layer, excluded=0):
    """DetectionScore against one gold layer, or None when it is undefined."""
    golds = gold_labels(corpus, layer)
    try:
        return score_detection(predictions, golds, excluded=excluded)
    except MetricError as exc:
        logger.warning('No %s score: %s', GoldLayer(layer).value, exc)
        return None


def detection_row(method, model, score):
    if score is None:
        return (method, model, None, None, 0, 0)
    return (method, model, score.balanced_accuracy, score.f1_macro, score.scored, score.excluded)


def prompt_row(method, model, corpus, predictions, excluded, rewrite_count, mean_distance):
    scores = [layer_score(corpus, predictions, layer, excluded) for layer in GoldLayer]
    return (
        method, model,
        *[score.balanced_accuracy if score else None for score in scores],
        rewrite_count, mean_distance,
    )


def type_codes(corpus):
    return {claim.id: claim.ambiguity_type for claim in corpus.claims if claim.ambiguity_type is not None}


def recall_row(method, recalls):
    return (method, *[recalls.get(code) for code in (1, 2, 3, 4)])


def recall_rows(corpus, runs):
    """Per-run recall rows plus the average across runs."""
    golds = gold_labels(corpus, GoldLayer.SUBJECTIVITY)
    codes = type_codes(corpus)
    rows = []
    maps = []
    for method, predictions in runs:
        recalls = recall_by_type(predictions, golds, codes)
        maps.append(recalls)
        rows.append(recall_row(method, recalls))
    if len(maps) > 1:
        rows.append(recall_row('mean', mean_recall_by_type(maps)))
    return rows


def tables(detection=(), prompts=(), recalls=()):
    built = []
    if detection:
        built.append(ReportTable('detection', DETECTION_COLUMNS, tuple(detection)))
    if prompts:
        built.append(ReportTable('prompt_comparison', PROMPT_COLUMNS, tuple(prompts)))
    if recalls:
        built.append(ReportTable('recall_by_type', RECALL_COLUMNS, tuple(recalls)))
    return built
