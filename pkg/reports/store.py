"""Recording finished runs in the database."""

import logging

from django.db import transaction

from .models import ClaimOutcome, RunRecord

logger = logging.getLogger(__name__)


@transaction.atomic
def record_run(config, command, metrics, outcomes=(), claim_count=0, failure_count=0, cache_digest=''):
    """
    Upsert the RunRecord for a config and replace its claim outcomes.

    `outcomes` are dicts with ClaimOutcome field names.
    """
    run, created = RunRecord.objects.update_or_create(
        run_id=config.run_id,
        defaults={
            'command': command,
            'model_name': config.model,
            'method': config.method,
            'mode': config.mode,
            'seed': config.seed,
            'corpus_path': config.corpus_path,
            'output_dir': config.output_dir,
            'config_digest': config.digest,
            'cache_digest': cache_digest,
            'metrics': metrics,
            'claim_count': claim_count,
            'failure_count': failure_count,
        },
    )
    run.outcomes.all().delete()
    ClaimOutcome.objects.bulk_create([ClaimOutcome(run=run, **outcome) for outcome in outcomes])
    logger.info('%s run record %s (%d outcomes)', 'Created' if created else 'Updated', run.run_id, len(outcomes))
    return run
