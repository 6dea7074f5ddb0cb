"""
Management command to validate a corpus file and print its label breakdowns.

Usage:
    python manage.py validate_corpus resources/mini_corpus.json
    python manage.py validate_corpus storysumm.json --format storysumm --subjectivity subjectivity.json
"""

import os

from corpus.counts import CountAxis, count_labels
from reports.commands import PipelineCommand
from reports.store import record_run
from reports.writers import ReportTable, write_provenance, write_report


class Command(PipelineCommand):
    help = 'Validate a corpus file and report faithfulness/subjectivity and ambiguity-type counts'
    command_name = 'validate'

    def add_arguments(self, parser):
        parser.add_argument(
            'file_path',
            type=str,
            help='Path to the corpus file'
        )
        parser.add_argument('--format', dest='corpus_format', choices=['native', 'storysumm'], default='native')
        parser.add_argument('--subjectivity', type=str, default=None, help='Subjectivity overlay for the storysumm layout')
        parser.add_argument('--schema-version', type=str, default=None)
        parser.add_argument('--out', type=str, default=None, help='Output directory for the report files')

    def handle(self, *args, **options):
        options['corpus'] = options['file_path']
        corpus = self.load_corpus(options)
        config = self.build_config(options)

        tables = []
        metrics = {
            'stories': len(corpus.stories),
            'summaries': len(corpus.summaries),
            'claims': corpus.claim_count,
            'in_scope_claims': len(corpus.in_scope_contexts()),
        }
        for axis in CountAxis:
            table = count_labels(corpus, axis, strict=False)
            if table.missing:
                preview = ', '.join(table.missing[:5])
                self.stdout.write(
                    self.style.WARNING(
                        f'{axis.value}: {len(table.missing)} claims lack the layer ({preview}); partial counts'
                    )
                )
            for key, count in table.rows():
                self.stdout.write(f'  {axis.value:<20} {key:<24} {count}')
                metrics[f'{axis.value}/{key}'] = count
            metrics[f'{axis.value}/missing'] = len(table.missing)
            tables.append(ReportTable(axis.value, ('cell', 'count'), tuple(table.rows())))

        os.makedirs(config.output_dir, exist_ok=True)
        write_provenance(config.output_dir, config, corpus_provenance=self.corpus_provenance(corpus))
        write_report(config.output_dir, metrics, tables)
        record_run(config, 'validate', metrics, claim_count=corpus.claim_count)

        self.stdout.write(
            self.style.SUCCESS(
                f'\nSummary: Stories {len(corpus.stories)}, Summaries {len(corpus.summaries)}, '
                f'Claims {corpus.claim_count}'
            )
        )

