"""
The rewrite pipeline: one rewrite (and explanation) per claim, and the three
signals derived from it (rewritten flag, edit distance, explanation size).
"""

import logging
from dataclasses import dataclass
from enum import Enum

from llmgw.backends import LlmRequest, ask_tagged, complete
from llmgw.exceptions import ExtractionError, GatewayError
from llmgw.extract import Arity, strip_tagged
from llmgw.runner import run_bounded
from llmgw.templates import load_template, render
from metrics.runstats import summary_stats
from textproc.distance import compare

from .exceptions import ParseFailedError, PreconditionError

logger = logging.getLogger(__name__)


class RewriteVariant(str, Enum):
    SUBJECTIVITY_FOCUSED = 'subjectivity_focused'
    INCONSISTENCY_FOCUSED = 'inconsistency_focused'
    BOTH = 'both'

    @property
    def template_name(self):
        return {
            RewriteVariant.SUBJECTIVITY_FOCUSED: 'rewrite_subjectivity',
            RewriteVariant.INCONSISTENCY_FOCUSED: 'rewrite_inconsistency',
            RewriteVariant.BOTH: 'rewrite_both',
        }[self]


EXPLANATION_SOURCES = ('response', 'generate')


@dataclass(frozen=True)
class RewriteResult:
    claim_id: str
    variant: RewriteVariant
    original_text: str
    rewrite_text: str
    rewritten: bool
    edit_distance: int
    normalized_edit_distance: float
    explanation_points: tuple = ()
    explanation_failed: bool = False
    in_scope: bool = True
    raw_responses: tuple = ()

    @property
    def explanation_size(self):
        return len(self.explanation_points)


@dataclass(frozen=True)
class ClaimFailure:
    claim_id: str
    stage: str
    message: str
    in_scope: bool = True
    raw_responses: tuple = ()


@dataclass(frozen=True)
class RewriteContext:
    story: object
    summary: object
    claim: object
    rewrite_text: str
    raw_response: str


@dataclass(frozen=True)
class ArmRun:
    run_id: str
    model: str
    variant: RewriteVariant
    seed: int
    results: tuple
    failures: tuple = ()

    @property
    def method(self):
        return f'arm_{self.variant.value}'

    @property
    def scored_results(self):
        return [result for result in self.results if result.in_scope]

    @property
    def failure_count(self):
        return sum(1 for failure in self.failures if failure.in_scope)

    @property
    def in_scope_claim_count(self):
        return len(self.scored_results) + self.failure_count

    def summary(self):
        return summary_stats(self.scored_results)


# ---------------------------------------------------------------------

def check_membership(story, summary, claim):
    if not claim.text.strip():
        raise PreconditionError(f'Claim {claim.id} has no text')
    if summary.story_id != story.id:
        raise PreconditionError(f'Summary {summary.id} does not belong to story {story.id}')
    if claim not in summary.claims:
        raise PreconditionError(f'Claim {claim.id} is not part of summary {summary.id}')


def rewrite_claim(backend, story, summary, claim, variant, options):
    """Ask for a rewrite of one claim; returns (rewrite_text, raw_response)."""
    check_membership(story, summary, claim)
    variant = RewriteVariant(variant)
    template = load_template(variant.template_name, options.prompts_dir)
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
    try:
        answer = ask_tagged(backend, request, 'answer', Arity.EXACTLY_ONE)
    except ExtractionError as exc:
        raise ParseFailedError(f'Rewrite of {claim.id}: {exc}', exc.raw_responses) from exc
    return answer.values[0], answer.response.raw_text


def _generated_explanation(backend, context, options):
    template = load_template('explanation_generate', options.prompts_dir)
    system, user = render(template, {
        'story': context.story.text,
        'summary': context.summary.text,
        'claim': context.claim.text,
        'rewrite': context.rewrite_text,
    })
    request = LlmRequest(
        model=options.model,
        system=system,
        user=user,
        temperature=options.temperature,
        max_tokens=options.max_tokens,
    )
    return complete(backend, request).raw_text.strip()


def explain_rewrite(backend, context, options):
    """
    Parse the explanation for a rewrite into its individual points.

    By default the explanation is the rewrite reply minus its answer span;
    with `explanation_source='generate'` a separate call produces it.
    """
    if options.explanation_source not in EXPLANATION_SOURCES:
        raise PreconditionError(f'Unknown explanation source "{options.explanation_source}"')
    if options.explanation_source == 'generate':
        explanation = _generated_explanation(backend, context, options)
    else:
        explanation = strip_tagged(context.raw_response, 'answer')
    if not explanation:
        raise ParseFailedError(f'No explanation text for {context.claim.id}')

    template = load_template('explanation_parse', options.prompts_dir)
    system, user = render(template, {'explanation': explanation})
    request = LlmRequest(
        model=options.model,
        system=system,
        user=user,
        temperature=options.temperature,
        max_tokens=options.max_tokens,
    )
    try:
        answer = ask_tagged(backend, request, 'item', Arity.ONE_OR_MORE)
    except ExtractionError as exc:
        raise ParseFailedError(f'Explanation of {context.claim.id}: {exc}', exc.raw_responses) from exc
    return list(answer.values)


def _process_claim(backend, variant, options, claim_context):
    story, summary, claim = claim_context.story, claim_context.summary, claim_context.claim
    in_scope = claim.in_scope
    try:
        rewrite_text, raw_response = rewrite_claim(backend, story, summary, claim, variant, options)
    except ParseFailedError as exc:
        logger.warning('parse_failed: %s', exc)
        return ClaimFailure(claim.id, 'parse_failed', str(exc), in_scope, exc.raw_responses)
    except GatewayError as exc:
        logger.warning('Backend failure on %s: %s', claim.id, exc)
        return ClaimFailure(claim.id, 'backend', str(exc), in_scope)

    rewritten, distance, ratio = compare(claim.text, rewrite_text, mode=options.equality_mode)

    points = ()
    explanation_failed = False
    raw_responses = [raw_response]
    if rewritten:
        context = RewriteContext(story, summary, claim, rewrite_text, raw_response)
        try:
            points = tuple(explain_rewrite(backend, context, options))
        except ParseFailedError as exc:
            logger.warning('Explanation parse_failed: %s', exc)
            explanation_failed = True
            raw_responses.extend(exc.raw_responses)
        except GatewayError as exc:
            logger.warning('Backend failure explaining %s: %s', claim.id, exc)
            explanation_failed = True

    return RewriteResult(
        claim_id=claim.id,
        variant=variant,
        original_text=claim.text,
        rewrite_text=rewrite_text,
        rewritten=rewritten,
        edit_distance=distance,
        normalized_edit_distance=ratio,
        explanation_points=points,
        explanation_failed=explanation_failed,
        in_scope=in_scope,
        raw_responses=tuple(raw_responses),
    )


def run_arm(corpus, backend, variant, seed, options, run_id=None):
    """
    Rewrite every claim of the corpus and collect the results.

    N/A commentary claims are rewritten too but marked out of scope. A
    failing claim is recorded and the run carries on.
    """
    variant = RewriteVariant(variant)
    contexts = list(corpus.contexts())

    outcomes = run_bounded(
        lambda claim_context: _process_claim(backend, variant, options, claim_context),
        contexts,
        options.parallelism,
    )

    results = tuple(outcome for outcome in outcomes if isinstance(outcome, RewriteResult))
    failures = tuple(outcome for outcome in outcomes if isinstance(outcome, ClaimFailure))
    run = ArmRun(
        run_id=run_id or f'arm-{variant.value}-{options.model}-{seed}',
        model=options.model,
        variant=variant,
        seed=seed,
        results=results,
        failures=failures,
    )
    stats = run.summary()
    logger.info(
        'ARM %s/%s: %d scored, %d rewritten, mean edit distance %.4f, %d failures',
        options.model, variant.value, len(run.scored_results), stats['rewrite_count'],
        stats['mean_normalized_edit_distance'], run.failure_count,
    )
    return run


def arm_predictions(run):
    """
    Detection labels from a run: positive (ambiguity flagged) iff rewritten.

    Returns (claim_id -> bool, number of in-scope claims excluded as failures).
    """
    predictions = {result.claim_id: result.rewritten for result in run.scored_results}
    return predictions, run.failure_count
