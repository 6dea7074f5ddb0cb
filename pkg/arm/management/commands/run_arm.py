"""
Management command to run the rewrite metric over a corpus.

Usage:
    python manage.py run_arm --corpus resources/mini_corpus.json --model claude-3-5-sonnet-20240620 \
        --mode replay --cache cache/ --variant both --gold subjectivity --out runs/arm
"""

import os

from arm.pipeline import EXPLANATION_SOURCES, RewriteVariant, arm_predictions, run_arm
from llmgw.exceptions import GatewayError
from reports.commands import PipelineCommand
from reports.store import record_run
from reports.tables import arm_records, detection_row, layer_score, outcome_rows, prompt_row, recall_rows, tables
from reports.writers import export_xlsx, write_provenance, write_report, write_results


class Command(PipelineCommand):
    help = 'Rewrite every claim with one prompt variant and score the rewrites as detections'
    command_name = 'arm'

    def add_arguments(self, parser):
        self.add_run_arguments(parser)
        self.add_gold_argument(parser)
        parser.add_argument(
            '--variant', choices=[variant.value for variant in RewriteVariant],
            default=RewriteVariant.BOTH.value, help='Rewrite prompt variant'
        )
        parser.add_argument(
            '--explanations', choices=EXPLANATION_SOURCES, default=None,
            help='Where explanation text comes from'
        )

    def handle(self, *args, **options):
        variant = RewriteVariant(options['variant'])
        corpus = self.load_corpus(options)
        config = self.build_config(options, method=f'arm_{variant.value}')
        backend = self.build_backend(config)
        run_options = self.run_options(config, explanation_source=options.get('explanations'))

        try:
            run = run_arm(corpus, backend, variant, config.seed, run_options, run_id=config.run_id)
        except GatewayError as exc:
            self.fail(exc)

        self.report_failures(run.failures)
        self.check_backend_outcome(run.results, run.failures)

        predictions, excluded = arm_predictions(run)
        stats = run.summary()
        score = layer_score(corpus, predictions, config.gold, excluded)
        if score is None:
            self.stdout.write(self.style.WARNING(f'Detection score against "{config.gold}" is undefined for this corpus'))

        built = tables(
            detection=[detection_row(run.method, config.model, score)],
            prompts=[prompt_row(
                run.method, config.model, corpus, predictions, excluded,
                stats['rewrite_count'], stats['mean_normalized_edit_distance'],
            )],
            recalls=recall_rows(corpus, [(run.method, predictions)]),
        )

        metrics = {
            'run_id': run.run_id,
            'method': run.method,
            'model': config.model,
            'gold': config.gold,
            'in_scope_claims': run.in_scope_claim_count,
            'parse_failed': sum(1 for f in run.failures if f.in_scope and f.stage == 'parse_failed'),
            'backend_failures': sum(1 for f in run.failures if f.in_scope and f.stage == 'backend'),
            'rewrite_count': stats['rewrite_count'],
            'mean_normalized_edit_distance': stats['mean_normalized_edit_distance'],
            'mean_explanation_size': stats['mean_explanation_size'],
            'explanation_failures': stats['explanation_failures'],
            'detection': score.as_dict() if score else None,
        }

        os.makedirs(config.output_dir, exist_ok=True)
        cache_digest = self.cache_digest(config)
        write_provenance(
            config.output_dir, config, cache_digest,
            corpus_provenance=self.corpus_provenance(corpus),
            notes={'explanation_source': run_options.explanation_source,
                   'equality_mode': run_options.equality_mode,
                   'temperature': run_options.temperature},
        )
        records = arm_records(run)
        write_results(config.output_dir, run.run_id, run.method, records, extra={'model': config.model, 'seed': config.seed})
        write_report(config.output_dir, metrics, built)
        if config.xlsx:
            export_xlsx(config.output_dir, built)

        record_run(
            config, 'arm', metrics, outcome_rows(records),
            claim_count=run.in_scope_claim_count, failure_count=run.failure_count, cache_digest=cache_digest,
        )

        if score is not None:
            self.stdout.write(self.style.SUCCESS(
                f'{run.method}: balanced accuracy {score.balanced_accuracy:.2f} / F1-macro {score.f1_macro:.2f}'
            ))
        self.stdout.write(
            self.style.SUCCESS(
                f'\nSummary: Rewritten {stats["rewrite_count"]}, '
                f'Avg edit distance {stats["mean_normalized_edit_distance"]:.2f}, '
                f'Failed {run.failure_count}, Output {config.output_dir}'
            )
        )
