"""
Spliced summaries and the finetuning export.

At each claim position the objective option is the original claim (if it is
objective) or its to_objective variant; the subjective option is the
original (if subjective) or its to_subjective variant. A seeded coin picks
one per position.
"""

import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from corpus.loader import corpus_to_document, dump_json
from corpus.schema import Claim, Corpus, Subjectivity, SummaryRecord

from .exceptions import MissingVariantError

logger = logging.getLogger(__name__)

ON_MISSING = ('error', 'keep_original')


@dataclass(frozen=True)
class SpliceChoice:
    position: int
    source_claim_id: str
    # None when the position kept its original claim for lack of variants
    polarity: Subjectivity | None
    text: str
    template_name: str | None = None
    ambiguity_type: int | None = None


@dataclass(frozen=True)
class SplicedSummary:
    summary_id: str
    story_id: str
    seed: int
    choices: tuple

    @property
    def id(self):
        return f'{self.summary_id}-splice-{self.seed}'

    @property
    def expected_polarities(self):
        return [choice.polarity.value if choice.polarity else None for choice in self.choices]


def _options(claim, variants_by_claim):
    """polarity -> list of (text, template_name, ambiguity_type) candidates."""
    options = {Subjectivity.OBJECTIVE: [], Subjectivity.SUBJECTIVE: []}
    if claim.subjectivity is not None:
        options[claim.subjectivity].append((claim.text, None, claim.ambiguity_type))
    for variant in variants_by_claim.get(claim.id, []):
        options[variant.polarity].append((variant.text, variant.template_name, variant.ambiguity_type))
    return options


def splice(corpus, variants, seed, on_missing='error'):
    """
    Assemble one spliced summary per corpus summary.

    Flagged variants are never used. With `on_missing='keep_original'`,
    positions lacking either polarity (N/A, type 5, unlabeled) keep their
    original claim with no expected polarity; otherwise they raise
    MissingVariantError.
    """
    if on_missing not in ON_MISSING:
        raise ValueError(f'on_missing must be one of {ON_MISSING}')

    variants_by_claim = {}
    for variant in sorted(variants, key=lambda v: (v.source_claim_id, v.template_name)):
        if variant.accepted:
            variants_by_claim.setdefault(variant.source_claim_id, []).append(variant)

    rng = np.random.default_rng(seed)
    spliced = []
    for summary in corpus.summaries:
        choices = []
        for position, claim in enumerate(summary.claims):
            options = _options(claim, variants_by_claim)
            missing = [polarity for polarity, found in options.items() if not found]
            if missing:
                if on_missing == 'error':
                    raise MissingVariantError(summary.id, position, missing[0].value)
                choices.append(SpliceChoice(position, claim.id, None, claim.text))
                continue

            polarity = Subjectivity.SUBJECTIVE if rng.random() < 0.5 else Subjectivity.OBJECTIVE
            candidates = options[polarity]
            text, template_name, code = candidates[int(rng.integers(len(candidates)))]
            choices.append(SpliceChoice(position, claim.id, polarity, text, template_name, code))

        spliced.append(SplicedSummary(
            summary_id=summary.id, story_id=summary.story_id, seed=seed, choices=tuple(choices),
        ))
    logger.info('Spliced %d summaries with seed %d', len(spliced), seed)
    return spliced


def spliced_corpus(corpus, spliced):
    """The spliced summaries as a Corpus over the same stories."""
    summaries = []
    for item in spliced:
        source = next(summary for summary in corpus.summaries if summary.id == item.summary_id)
        claims = []
        for choice in item.choices:
            subjective = choice.polarity == Subjectivity.SUBJECTIVE
            claims.append(Claim(
                id=f'{choice.source_claim_id}-{choice.polarity.value if choice.polarity else "original"}',
                text=choice.text,
                subjectivity=choice.polarity,
                ambiguity_type=choice.ambiguity_type if subjective else None,
            ))
        summaries.append(SummaryRecord(
            id=item.id,
            story_id=item.story_id,
            writer=source.writer,
            claims=tuple(claims),
            writer_kind=source.writer_kind,
        ))
    story_ids = {item.story_id for item in spliced}
    stories = tuple(story for story in corpus.stories if story.id in story_ids)
    return Corpus(stories=stories, summaries=tuple(summaries), provenance=corpus.provenance)


def write_spliced(corpus, spliced, path, provenance):
    """Write spliced summaries in the corpus schema plus per-claim expected polarity."""
    document = corpus_to_document(spliced_corpus(corpus, spliced))
    for record, item in zip(document['summaries'], spliced):
        record['seed'] = item.seed
        record['source_summary_id'] = item.summary_id
        for claim_record, choice in zip(record['claims'], item.choices):
            claim_record['expected_polarity'] = choice.polarity.value if choice.polarity else None
            claim_record['source_claim_id'] = choice.source_claim_id
            if choice.template_name:
                claim_record['template_name'] = choice.template_name
    document['provenance'] = provenance
    dump_json(document, path)


def _summary_with(summary, claim_id, text):
    return ' '.join(text if claim.id == claim_id else claim.text for claim in summary.claims)


def finetune_records(corpus, variants):
    """One {story, summary, claim, label} record per accepted variant, in a stable order."""
    records = []
    for variant in sorted(variants, key=lambda v: (v.source_claim_id, v.template_name)):
        if not variant.accepted:
            continue
        context = corpus.context(variant.source_claim_id)
        records.append({
            'story': context.story.text,
            'summary': _summary_with(context.summary, variant.source_claim_id, variant.text),
            'claim': variant.text,
            'label': variant.polarity.value,
        })
    return records


def export_finetune_corpus(corpus, variants, path):
    """Write the JSON-lines finetuning file; returns the number of lines."""
    records = finetune_records(corpus, variants)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
            f.write('\n')
    logger.info('Exported %d finetuning records to %s', len(records), path)
    return len(records)
