"""
Prompt-only detectors used as reference points for the rewrite metric.

zero_shot / few_shot ask "Is this claim objective to evaluate?"; a Yes is
the negative class. self_consistency samples three chain-of-thought
answers to "Is all of the information in this claim consistent with the
story?" at temperature 0.7 and takes the majority; a majority No is the
positive class. In both cases: flagged iff the answer is No.
"""

import logging
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum

from arm.exceptions import ParseFailedError
from arm.pipeline import ClaimFailure, check_membership
from llmgw.backends import SELF_CONSISTENCY_TEMPERATURE, LlmRequest, ask_tagged
from llmgw.exceptions import ExtractionError, GatewayError
from llmgw.extract import Arity, parse_yes_no
from llmgw.runner import run_bounded
from llmgw.templates import load_template, render

logger = logging.getLogger(__name__)

MIN_PARSED_SAMPLES = 2


class BaselineKind(str, Enum):
    ZERO_SHOT = 'zero_shot'
    FEW_SHOT = 'few_shot'
    SELF_CONSISTENCY = 'self_consistency'


@dataclass(frozen=True)
class BaselineMethod:
    kind: BaselineKind
    template_name: str
    sample_count: int = 1
    temperature: float = 0.0

    @classmethod
    def for_kind(cls, kind):
        kind = BaselineKind(kind)
        if kind == BaselineKind.SELF_CONSISTENCY:
            return cls(kind, 'baseline_self_consistency', 3, SELF_CONSISTENCY_TEMPERATURE)
        return cls(kind, f'baseline_{kind.value}', 1, 0.0)

    @property
    def name(self):
        return self.kind.value


@dataclass(frozen=True)
class Classification:
    claim_id: str
    # True = flagged (subjective / inconsistent)
    flagged: bool
    answers: tuple
    tie: bool = False
    in_scope: bool = True
    raw_responses: tuple = ()


@dataclass(frozen=True)
class BaselineRun:
    run_id: str
    model: str
    method: BaselineMethod
    seed: int
    predictions: tuple
    failures: tuple = ()

    @property
    def failure_count(self):
        return len(self.failures)

    @property
    def tie_count(self):
        return sum(1 for prediction in self.predictions if prediction.tie)

    def prediction_map(self):
        return {prediction.claim_id: prediction.flagged for prediction in self.predictions}


def _vote(answers):
    """Majority over parsed Yes(True)/No(False) answers; a tie goes to No."""
    counts = Counter(answers)
    yes, no = counts.get(True, 0), counts.get(False, 0)
    if yes == no:
        return False, True
    return yes > no, False


def classify_claim(backend, method, story, summary, claim, options):
    """
    Classify one claim; returns a Classification.

    Raises ParseFailedError when the single sample (or too many of the
    self-consistency samples) cannot be read as Yes/No after one re-ask.
    """
    check_membership(story, summary, claim)
    template = load_template(method.template_name, options.prompts_dir)
    system, user = render(template, {
        'story': story.text,
        'summary': summary.text,
        'claim': claim.text,
    })
    temperature = method.temperature if method.kind == BaselineKind.SELF_CONSISTENCY else options.temperature
    base = LlmRequest(
        model=options.model,
        system=system,
        user=user,
        temperature=temperature,
        max_tokens=options.max_tokens,
    )

    answers = []
    raw_responses = []
    for sample_index in range(method.sample_count):
        request = replace(base, sample_index=sample_index)
        try:
            answer = ask_tagged(backend, request, 'answer', Arity.EXACTLY_ONE, parse=parse_yes_no)
        except ExtractionError as exc:
            raw_responses.extend(exc.raw_responses)
            if method.sample_count == 1:
                raise ParseFailedError(f'{method.name} on {claim.id}: {exc}', raw_responses) from exc
            logger.warning('Sample %d for %s unparseable: %s', sample_index, claim.id, exc)
            continue
        raw_responses.extend(answer.raw_responses)
        answers.append(answer.values[0])

    if method.sample_count > 1 and len(answers) < MIN_PARSED_SAMPLES:
        raise ParseFailedError(
            f'{method.name} on {claim.id}: only {len(answers)} of {method.sample_count} samples parsed',
            raw_responses,
        )

    is_yes, tie = _vote(answers)
    if tie:
        logger.info('Self-consistency tie on %s resolved to No', claim.id)
    return Classification(
        claim_id=claim.id,
        flagged=not is_yes,
        answers=tuple('Yes' if answer else 'No' for answer in answers),
        tie=tie,
        in_scope=claim.in_scope,
        raw_responses=tuple(raw_responses),
    )


def _classify_context(backend, method, options, context):
    try:
        return classify_claim(backend, method, context.story, context.summary, context.claim, options)
    except ParseFailedError as exc:
        logger.warning('parse_failed: %s', exc)
        return ClaimFailure(context.claim.id, 'parse_failed', str(exc), True, exc.raw_responses)
    except GatewayError as exc:
        logger.warning('Backend failure on %s: %s', context.claim.id, exc)
        return ClaimFailure(context.claim.id, 'backend', str(exc), True)


def run_baseline(corpus, backend, method, seed, options, run_id=None):
    """Classify every in-scope claim; failures are recorded, never fatal."""
    if not isinstance(method, BaselineMethod):
        method = BaselineMethod.for_kind(method)

    outcomes = run_bounded(
        lambda context: _classify_context(backend, method, options, context),
        corpus.in_scope_contexts(),
        options.parallelism,
    )
    predictions = tuple(outcome for outcome in outcomes if isinstance(outcome, Classification))
    failures = tuple(outcome for outcome in outcomes if isinstance(outcome, ClaimFailure))
    run = BaselineRun(
        run_id=run_id or f'baseline-{method.name}-{options.model}-{seed}',
        model=options.model,
        method=method,
        seed=seed,
        predictions=predictions,
        failures=failures,
    )
    logger.info(
        'Baseline %s/%s: %d predictions, %d flagged, %d failures, %d ties',
        options.model, method.name, len(predictions),
        sum(1 for p in predictions if p.flagged), run.failure_count, run.tie_count,
    )
    return run
