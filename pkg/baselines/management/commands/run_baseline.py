"""
Management command to run a prompt-only detection baseline.

Usage:
    python manage.py run_baseline --method few_shot --corpus resources/mini_corpus.json \
        --model claude-3-5-sonnet-20240620 --mode replay --cache cache/ --out runs/few_shot
"""

import os

from baselines.classify import BaselineKind, BaselineMethod, run_baseline
from llmgw.exceptions import GatewayError
from reports.commands import PipelineCommand
from reports.store import record_run
from reports.tables import baseline_records, detection_row, layer_score, outcome_rows, recall_rows, tables
from reports.writers import export_xlsx, write_provenance, write_report, write_results


class Command(PipelineCommand):
    help = 'Classify claims with a zero-shot, few-shot or self-consistency prompt'
    command_name = 'baseline'

    def add_arguments(self, parser):
        self.add_run_arguments(parser)
        self.add_gold_argument(parser)
        parser.add_argument(
            '--method', choices=[kind.value for kind in BaselineKind], required=True,
            help='Baseline method'
        )

    def handle(self, *args, **options):
        method = BaselineMethod.for_kind(options['method'])
        corpus = self.load_corpus(options)
        config = self.build_config(options, method=method.name)
        backend = self.build_backend(config)
        run_options = self.run_options(config)

        try:
            run = run_baseline(corpus, backend, method, config.seed, run_options, run_id=config.run_id)
        except GatewayError as exc:
            self.fail(exc)

        self.report_failures(run.failures)
        self.check_backend_outcome(run.predictions, run.failures)
        if run.tie_count:
            self.stdout.write(self.style.WARNING(f'{run.tie_count} self-consistency ties resolved to No'))

        predictions = run.prediction_map()
        score = layer_score(corpus, predictions, config.gold, run.failure_count)
        if score is None:
            self.stdout.write(self.style.WARNING(f'Detection score against "{config.gold}" is undefined for this corpus'))

        built = tables(
            detection=[detection_row(method.name, config.model, score)],
            recalls=recall_rows(corpus, [(method.name, predictions)]),
        )
        metrics = {
            'run_id': run.run_id,
            'method': method.name,
            'model': config.model,
            'gold': config.gold,
            'samples': method.sample_count,
            'temperature': method.temperature,
            'predictions': len(run.predictions),
            'flagged': sum(1 for flagged in predictions.values() if flagged),
            'parse_failed': sum(1 for f in run.failures if f.stage == 'parse_failed'),
            'backend_failures': sum(1 for f in run.failures if f.stage == 'backend'),
            'ties': run.tie_count,
            'detection': score.as_dict() if score else None,
        }

        os.makedirs(config.output_dir, exist_ok=True)
        cache_digest = self.cache_digest(config)
        write_provenance(
            config.output_dir, config, cache_digest,
            corpus_provenance=self.corpus_provenance(corpus),
            notes={'tie_rule': 'self-consistency ties resolve to No (flagged)'},
        )
        records = baseline_records(run)
        write_results(config.output_dir, run.run_id, method.name, records, extra={'model': config.model, 'seed': config.seed})
        write_report(config.output_dir, metrics, built)
        if config.xlsx:
            export_xlsx(config.output_dir, built)

        record_run(
            config, 'baseline', metrics, outcome_rows(records),
            claim_count=len(run.predictions) + run.failure_count,
            failure_count=run.failure_count, cache_digest=cache_digest,
        )

        if score is not None:
            self.stdout.write(self.style.SUCCESS(
                f'{method.name}: balanced accuracy {score.balanced_accuracy:.2f} / F1-macro {score.f1_macro:.2f}'
            ))
        self.stdout.write(
            self.style.SUCCESS(
                f'\nSummary: Classified {len(run.predictions)}, Flagged {metrics["flagged"]}, '
                f'Failed {run.failure_count}, Output {config.output_dir}'
            )
        )
