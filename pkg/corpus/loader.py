"""
Reading and writing corpus files.

Native layout (schema version "1"), one JSON document:

    {
      "schema_version": "1",
      "stories":   [{"id", "title", "text"}],
      "summaries": [{"id", "story_id", "writer", "writer_kind",
                     "claims": [{"id", "text",
                                 "faithfulness_labels": [{"annotator_id", "value"}],
                                 "subjectivity", "ambiguity_type",
                                 "gold_faithfulness"}]}]
    }

`subjectivity`, `ambiguity_type`, `gold_faithfulness` and `writer_kind` are
optional. Extra keys on a claim (e.g. `expected_polarity` on spliced
summaries) are ignored by the loader.

The StorySumm release is read through `load_storysumm`, which maps its
summary-keyed records onto the same model.
"""

import hashlib
import json
import logging
import os

from .exceptions import CorpusError, DanglingReferenceError
from .schema import (
    AMBIGUITY_TYPES, SCHEMA_VERSION, WRITER_KINDS, Claim, Corpus, FaithLabel,
    FaithStatus, Provenance, Story, Subjectivity, SummaryRecord, parse_faith_status,
)
from .segment import segment_sentences

logger = logging.getLogger(__name__)

SUPPORTED_SCHEMA_VERSIONS = (SCHEMA_VERSION,)


def _read_json(path):
    if not os.path.exists(path):
        raise CorpusError(f'File not found: {path}')
    with open(path, 'r', encoding='utf-8') as f:
        raw = f.read()
    if not raw.strip():
        raise CorpusError(f'Empty corpus file: {path}')
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorpusError(f'Invalid JSON in {path}: {exc}') from exc


def _require(record, key, record_id):
    value = record.get(key)
    if value is None or (isinstance(value, str) and not value.strip()):
        raise CorpusError(f'Missing or empty field "{key}"', record_id)
    return value


# ---------------------------------------------------------------------

def parse_claim(record, check_sentences=True):
    claim_id = str(_require(record, 'id', record.get('id', '<claim without id>')))
    text = _require(record, 'text', claim_id).strip()

    if check_sentences and len(segment_sentences(text)) != 1:
        raise CorpusError('Claim text spans more than one sentence', claim_id)

    labels = []
    for label in record.get('faithfulness_labels') or []:
        value = parse_faith_status(label.get('value', ''))
        if value is None:
            raise CorpusError(f'Unknown faithfulness label "{label.get("value")}"', claim_id)
        labels.append(FaithLabel(annotator_id=str(_require(label, 'annotator_id', claim_id)), value=value))

    subjectivity = record.get('subjectivity')
    if subjectivity is not None:
        try:
            subjectivity = Subjectivity(str(subjectivity).lower())
        except ValueError:
            raise CorpusError(f'Unknown subjectivity label "{subjectivity}"', claim_id)

    ambiguity_type = record.get('ambiguity_type')
    if ambiguity_type is not None:
        try:
            ambiguity_type = int(ambiguity_type)
        except (TypeError, ValueError):
            raise CorpusError(f'Ambiguity type must be an integer, got "{ambiguity_type}"', claim_id)
        if ambiguity_type not in AMBIGUITY_TYPES:
            raise CorpusError(f'Ambiguity type {ambiguity_type} outside 1-5', claim_id)
        if subjectivity != Subjectivity.SUBJECTIVE:
            raise CorpusError('Ambiguity type given on a claim that is not subjective', claim_id)

    gold = record.get('gold_faithfulness')
    if gold is not None:
        gold_value = parse_faith_status(gold)
        if gold_value is None:
            raise CorpusError(f'Unknown gold faithfulness label "{gold}"', claim_id)
        gold = gold_value

    return Claim(
        id=claim_id,
        text=text,
        faithfulness_labels=tuple(labels),
        subjectivity=subjectivity,
        ambiguity_type=ambiguity_type,
        gold_faithfulness=gold,
    )


def parse_corpus(document, source_path='', schema_version=None, check_sentences=True):
    """Build and validate a Corpus from an already-decoded JSON document."""
    if not isinstance(document, dict):
        raise CorpusError('Corpus document must be a JSON object')

    version = str(document.get('schema_version', SCHEMA_VERSION))
    if schema_version is not None and version != str(schema_version):
        raise CorpusError(f'Schema version {version} does not match requested {schema_version}')
    if version not in SUPPORTED_SCHEMA_VERSIONS:
        raise CorpusError(f'Unsupported schema version {version}')

    for key in ('stories', 'summaries'):
        if not isinstance(document.get(key), list):
            raise CorpusError(f'Top-level "{key}" array is missing')

    stories = []
    story_ids = set()
    for record in document['stories']:
        story_id = str(_require(record, 'id', record.get('id', '<story without id>')))
        if story_id in story_ids:
            raise CorpusError('Duplicate story id', story_id)
        story_ids.add(story_id)
        stories.append(Story(
            id=story_id,
            title=str(record.get('title') or ''),
            text=_require(record, 'text', story_id),
        ))

    summaries = []
    summary_ids = set()
    claim_ids = set()
    for record in document['summaries']:
        summary_id = str(_require(record, 'id', record.get('id', '<summary without id>')))
        if summary_id in summary_ids:
            raise CorpusError('Duplicate summary id', summary_id)
        summary_ids.add(summary_id)

        story_id = str(_require(record, 'story_id', summary_id))
        if story_id not in story_ids:
            raise DanglingReferenceError(f'Unknown story_id "{story_id}"', summary_id)

        writer_kind = record.get('writer_kind', 'llm')
        if writer_kind not in WRITER_KINDS:
            raise CorpusError(f'Unknown writer_kind "{writer_kind}"', summary_id)

        raw_claims = record.get('claims') or []
        if not raw_claims:
            raise CorpusError('Summary has no claims', summary_id)

        claims = []
        for raw_claim in raw_claims:
            claim = parse_claim(raw_claim, check_sentences=check_sentences)
            if claim.id in claim_ids:
                raise CorpusError('Duplicate claim id', claim.id)
            claim_ids.add(claim.id)
            claims.append(claim)

        summaries.append(SummaryRecord(
            id=summary_id,
            story_id=story_id,
            writer=str(record.get('writer') or ''),
            claims=tuple(claims),
            writer_kind=writer_kind,
        ))

    if not stories or not summaries:
        raise CorpusError('Corpus has no stories or no summaries')

    return Corpus(
        stories=tuple(stories),
        summaries=tuple(summaries),
        provenance=Provenance(source_path=str(source_path), schema_version=version),
    )


def load_corpus(path, schema_version=None, check_sentences=True):
    """Load a native corpus file; raises CorpusError on any schema violation."""
    document = _read_json(path)
    corpus = parse_corpus(
        document,
        source_path=path,
        schema_version=schema_version,
        check_sentences=check_sentences,
    )
    logger.info(
        'Loaded corpus %s: %d stories, %d summaries, %d claims',
        path, len(corpus.stories), len(corpus.summaries), corpus.claim_count,
    )
    return corpus


# ---------------------------------------------------------------------

def claim_to_record(claim):
    record = {
        'id': claim.id,
        'text': claim.text,
        'faithfulness_labels': [
            {'annotator_id': label.annotator_id, 'value': label.value.value}
            for label in claim.faithfulness_labels
        ],
    }
    if claim.subjectivity is not None:
        record['subjectivity'] = claim.subjectivity.value
    if claim.ambiguity_type is not None:
        record['ambiguity_type'] = claim.ambiguity_type
    if claim.gold_faithfulness is not None:
        record['gold_faithfulness'] = claim.gold_faithfulness.value
    return record


def corpus_to_document(corpus):
    return {
        'schema_version': corpus.provenance.schema_version or SCHEMA_VERSION,
        'stories': [
            {'id': story.id, 'title': story.title, 'text': story.text}
            for story in corpus.stories
        ],
        'summaries': [
            {
                'id': summary.id,
                'story_id': summary.story_id,
                'writer': summary.writer,
                'writer_kind': summary.writer_kind,
                'claims': [claim_to_record(claim) for claim in summary.claims],
            }
            for summary in corpus.summaries
        ],
    }


def dump_json(document, path):
    """Write JSON deterministically (sorted keys, fixed indent, trailing newline)."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(document, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write('\n')


def write_corpus(corpus, path):
    dump_json(corpus_to_document(corpus), path)


# ---------------------------------------------------------------------
# StorySumm release adapter

def _first(record, *keys, default=None):
    for key in keys:
        if key in record and record[key] is not None:
            return record[key]
    return default


def _story_id(text):
    return 'story-' + hashlib.sha1(text.encode('utf-8')).hexdigest()[:10]


def _sentence_labels(raw, summary_key, index):
    """A sentence label is either one adjudicated string or a list of annotator labels."""
    if isinstance(raw, dict):
        raw = raw.get(str(index), raw.get(index))
    elif isinstance(raw, list):
        raw = raw[index] if index < len(raw) else None
    if raw is None:
        return (), None

    values = raw if isinstance(raw, list) else [raw]
    labels = []
    for position, value in enumerate(values):
        status = parse_faith_status(value)
        if status is None:
            raise CorpusError(f'Unknown StorySumm label "{value}"', f'{summary_key}-{index}')
        labels.append(FaithLabel(annotator_id=f'storysumm-{position + 1}', value=status))

    gold = labels[0].value if len(labels) == 1 else None
    return tuple(labels), gold


def load_storysumm(path, subjectivity_path=None):
    """
    Adapt the StorySumm release file to a Corpus.

    Expected release layout: an object keyed by summary key, each value with
    `story` (text), optional `title`, `summary` (list of sentences or a
    string), `model` (writer) and `sentence-labels` / `labels` (one entry per
    sentence). Claim ids are `<summary key>-<sentence index>`. Sentences are
    taken as shipped; the segmenter only runs when `summary` is a string.

    The optional subjectivity overlay maps claim id to
    `{"subjectivity": ..., "ambiguity_type": ...}`.
    """
    document = _read_json(path)
    if isinstance(document, list):
        document = {str(_first(item, 'id', default=i)): item for i, item in enumerate(document)}
    if not isinstance(document, dict) or not document:
        raise CorpusError('StorySumm file must be a non-empty object keyed by summary')

    overlay = _read_json(subjectivity_path) if subjectivity_path else {}

    stories = {}
    summaries = []
    for summary_key, record in document.items():
        story_text = _first(record, 'story', 'story_text')
        if not story_text:
            raise CorpusError('StorySumm record has no story text', summary_key)
        story_id = str(_first(record, 'story_id', default=_story_id(story_text)))
        stories.setdefault(story_id, Story(
            id=story_id,
            title=str(_first(record, 'title', default='')),
            text=story_text,
        ))

        sentences = _first(record, 'summary', 'sentences')
        if isinstance(sentences, str):
            sentences = segment_sentences(sentences)
        if not sentences:
            raise CorpusError('StorySumm record has no summary sentences', summary_key)

        raw_labels = _first(record, 'sentence-labels', 'sentence_labels', 'labels', default=[])
        writer = str(_first(record, 'model', 'writer', default='unknown'))
        writer_kind = _first(record, 'writer_kind', default='human' if writer.startswith('human') else 'llm')

        claims = []
        for index, sentence in enumerate(sentences):
            claim_id = f'{summary_key}-{index}'
            labels, gold = _sentence_labels(raw_labels, summary_key, index)
            extra = overlay.get(claim_id, {})
            claims.append(parse_claim({
                'id': claim_id,
                'text': sentence,
                'faithfulness_labels': [
                    {'annotator_id': label.annotator_id, 'value': label.value.value} for label in labels
                ],
                'subjectivity': extra.get('subjectivity'),
                'ambiguity_type': extra.get('ambiguity_type'),
                'gold_faithfulness': gold.value if isinstance(gold, FaithStatus) else None,
            }, check_sentences=False))

        summaries.append(SummaryRecord(
            id=str(summary_key),
            story_id=story_id,
            writer=writer,
            claims=tuple(claims),
            writer_kind=writer_kind,
        ))

    corpus = Corpus(
        stories=tuple(stories.values()),
        summaries=tuple(summaries),
        provenance=Provenance(source_path=str(path), schema_version=SCHEMA_VERSION, adapter='storysumm'),
    )
    logger.info(
        'Adapted StorySumm file %s: %d stories, %d summaries, %d claims',
        path, len(corpus.stories), len(corpus.summaries), corpus.claim_count,
    )
    return corpus


def open_corpus(path, fmt='native', schema_version=None, subjectivity_path=None):
    """Dispatch on the corpus format name used by the management commands."""
    if fmt == 'storysumm':
        return load_storysumm(path, subjectivity_path=subjectivity_path)
    if fmt != 'native':
        raise CorpusError(f'Unsupported corpus format "{fmt}". Use native or storysumm')
    return load_corpus(path, schema_version=schema_version)
