"""
Synthetic claim variants.

Objective claims are pushed toward one of the four ambiguity types
(to_subjective); subjective claims of types 1-4 are repaired
(to_objective). Each (direction, type) pair has its own prompt.
"""

import hashlib
import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from arm.exceptions import ParseFailedError, PreconditionError
from arm.pipeline import ClaimFailure, check_membership
from corpus.schema import ANALYZED_AMBIGUITY_TYPES, Subjectivity
from corpus.segment import segment_sentences
from llmgw.backends import LlmRequest, ask_tagged
from llmgw.exceptions import ExtractionError, GatewayError
from llmgw.extract import Arity
from llmgw.runner import run_bounded
from llmgw.templates import load_template, render
from textproc.distance import is_rewritten

logger = logging.getLogger(__name__)

TYPE_MODES = ('single', 'all')


class Direction(str, Enum):
    TO_OBJECTIVE = 'to_objective'
    TO_SUBJECTIVE = 'to_subjective'

    @property
    def polarity(self):
        """The polarity the variant is expected to have."""
        if self == Direction.TO_OBJECTIVE:
            return Subjectivity.OBJECTIVE
        return Subjectivity.SUBJECTIVE


def template_for(direction, ambiguity_type):
    direction = Direction(direction)
    if ambiguity_type not in ANALYZED_AMBIGUITY_TYPES:
        raise PreconditionError(f'No synthetic prompt for ambiguity type {ambiguity_type}')
    return f'synth_{direction.value}_type{ambiguity_type}'


@dataclass(frozen=True)
class SyntheticVariant:
    source_claim_id: str
    direction: Direction
    ambiguity_type: int
    text: str
    template_name: str
    flagged: bool = False
    raw_responses: tuple = ()
    # "unchanged" (to_subjective output equal to its source after the retry)
    # or "multi_sentence"
    flag_reason: str = ''

    @property
    def polarity(self):
        return self.direction.polarity

    @property
    def accepted(self):
        return not self.flagged


@dataclass(frozen=True)
class SynthRun:
    run_id: str
    model: str
    seed: int
    type_mode: str
    variants: tuple
    failures: tuple = ()

    @property
    def accepted(self):
        return [variant for variant in self.variants if variant.accepted]

    @property
    def flagged_count(self):
        return sum(1 for variant in self.variants if variant.flagged)


def _check_direction(claim, direction, ambiguity_type):
    if direction == Direction.TO_OBJECTIVE:
        if claim.subjectivity != Subjectivity.SUBJECTIVE:
            raise PreconditionError(f'Claim {claim.id} is not labeled subjective')
        if claim.ambiguity_type != ambiguity_type:
            raise PreconditionError(
                f'Claim {claim.id} has ambiguity type {claim.ambiguity_type}, not {ambiguity_type}'
            )
    elif claim.subjectivity != Subjectivity.OBJECTIVE:
        raise PreconditionError(f'Claim {claim.id} is not labeled objective')


def _ask_sentence(backend, request, claim_id):
    try:
        answer = ask_tagged(backend, request, 'sentence', Arity.EXACTLY_ONE)
    except ExtractionError as exc:
        raise ParseFailedError(f'Synthetic variant of {claim_id}: {exc}', exc.raw_responses) from exc
    return answer.values[0], answer.raw_responses


def generate_variant(backend, story, summary, claim, direction, ambiguity_type, options):
    """
    Produce one synthetic variant of a claim.

    A to_subjective output equal to its source (normalized comparison) is
    asked for once more; if it is still unchanged the variant is flagged.
    A variant that is not a single sentence is flagged as well.
    """
    check_membership(story, summary, claim)
    direction = Direction(direction)
    template_name = template_for(direction, ambiguity_type)
    _check_direction(claim, direction, ambiguity_type)

    template = load_template(template_name, options.prompts_dir)
    system, user = render(template, {
        'story': story.text,
        'summary': summary.text,
        'claim': claim.text,
    })
    request = LlmRequest(
        model=options.model,
        system=system,
        user=user,
        temperature=options.temperature,
        max_tokens=options.max_tokens,
    )
    text, raw_responses = _ask_sentence(backend, request, claim.id)

    flag_reason = ''
    if direction == Direction.TO_SUBJECTIVE and not is_rewritten(claim.text, text):
        logger.info('Variant of %s came back unchanged; asking again', claim.id)
        # past the attempts ask_tagged may already have used
        retry = replace(request, attempt=request.attempt + 2)
        text, more = _ask_sentence(backend, retry, claim.id)
        raw_responses = raw_responses + more
        if not is_rewritten(claim.text, text):
            logger.warning('Variant of %s still unchanged; flagged', claim.id)
            flag_reason = 'unchanged'

    # spliced claims must stay single sentences
    if not flag_reason and len(segment_sentences(text)) != 1:
        logger.warning('Variant of %s is not a single sentence; flagged', claim.id)
        flag_reason = 'multi_sentence'

    return SyntheticVariant(
        source_claim_id=claim.id,
        direction=direction,
        ambiguity_type=ambiguity_type,
        text=text,
        template_name=template_name,
        flagged=bool(flag_reason),
        raw_responses=tuple(raw_responses),
        flag_reason=flag_reason,
    )


def claim_rng(seed, claim_id):
    """A generator that depends only on the seed and the claim id."""
    key = int(hashlib.sha256(claim_id.encode('utf-8')).hexdigest()[:16], 16)
    return np.random.default_rng([seed, key])


def plan_tasks(corpus, seed, type_mode='single'):
    """
    (context, direction, type) jobs for a corpus.

    Subjective claims of types 1-4 get a to_objective job of their own type.
    Objective claims get one seeded type in `single` mode or all four in
    `all` mode. Unlabeled, N/A and type-5 claims get none.
    """
    if type_mode not in TYPE_MODES:
        raise PreconditionError(f'Unknown type mode "{type_mode}"')
    tasks = []
    for context in corpus.in_scope_contexts():
        claim = context.claim
        if claim.subjectivity == Subjectivity.SUBJECTIVE:
            if claim.ambiguity_type in ANALYZED_AMBIGUITY_TYPES:
                tasks.append((context, Direction.TO_OBJECTIVE, claim.ambiguity_type))
        elif claim.subjectivity == Subjectivity.OBJECTIVE:
            if type_mode == 'all':
                types = list(ANALYZED_AMBIGUITY_TYPES)
            else:
                types = [int(claim_rng(seed, claim.id).choice(ANALYZED_AMBIGUITY_TYPES))]
            for code in types:
                tasks.append((context, Direction.TO_SUBJECTIVE, code))
    return tasks


def _run_task(backend, options, task):
    context, direction, code = task
    try:
        return generate_variant(
            backend, context.story, context.summary, context.claim, direction, code, options,
        )
    except ParseFailedError as exc:
        logger.warning('parse_failed: %s', exc)
        return ClaimFailure(context.claim.id, 'parse_failed', str(exc), True, exc.raw_responses)
    except GatewayError as exc:
        logger.warning('Backend failure on %s: %s', context.claim.id, exc)
        return ClaimFailure(context.claim.id, 'backend', str(exc), True)


def generate_variants(corpus, backend, seed, options, type_mode='single', run_id=None):
    tasks = plan_tasks(corpus, seed, type_mode)
    outcomes = run_bounded(lambda task: _run_task(backend, options, task), tasks, options.parallelism)

    variants = tuple(outcome for outcome in outcomes if isinstance(outcome, SyntheticVariant))
    failures = tuple(outcome for outcome in outcomes if isinstance(outcome, ClaimFailure))
    run = SynthRun(
        run_id=run_id or f'synth-{options.model}-{seed}',
        model=options.model,
        seed=seed,
        type_mode=type_mode,
        variants=variants,
        failures=failures,
    )
    logger.info(
        'Synthetic variants: %d generated, %d flagged, %d failures',
        len(variants), run.flagged_count, len(failures),
    )
    return run
