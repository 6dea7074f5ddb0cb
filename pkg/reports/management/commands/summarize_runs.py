"""
Management command to combine several results files into the comparison tables.

Usage:
    python manage.py summarize_runs runs/arm_both/results.json runs/few_shot/results.json \
        --corpus resources/mini_corpus.json --gold subjectivity --out runs/summary
"""

import os

from corpus.exceptions import ArmEvalError
from reports.commands import PipelineCommand
from reports.store import record_run
from reports.tables import (
    detection_row, layer_score, load_results, predictions_from_records, prompt_row, recall_rows, tables,
)
from reports.writers import export_xlsx, write_provenance, write_report


def rewrite_stats(records):
    scored = [r for r in records if r['status'] == 'ok' and r.get('in_scope', True) and 'rewritten' in r]
    rewritten = [r for r in scored if r['rewritten']]
    if not rewritten:
        return len(rewritten), 0.0
    return len(rewritten), sum(r['normalized_edit_distance'] for r in rewritten) / len(rewritten)


class Command(PipelineCommand):
    help = 'Build detection, prompt-comparison and recall-by-type tables from results files'
    command_name = 'summarize'

    def add_arguments(self, parser):
        parser.add_argument('results', nargs='+', type=str, help='results.json files')
        self.add_run_arguments(parser, model=False)
        self.add_gold_argument(parser)

    def handle(self, *args, **options):
        corpus = self.load_corpus(options)
        config = self.build_config(options, method='summary')

        detection, prompts, runs = [], [], []
        rewrite_runs = []
        for path in options['results']:
            try:
                document = load_results(path)
            except ArmEvalError as exc:
                self.fail(exc)
            method = document.get('method', os.path.basename(os.path.dirname(path)))
            model = document.get('model', '')
            label = f'{model} {method}'.strip()
            predictions, failures = predictions_from_records(document['records'])

            score = layer_score(corpus, predictions, config.gold, failures)
            detection.append(detection_row(method, model, score))
            runs.append((label, predictions))

            if method.startswith('arm_'):
                count, distance = rewrite_stats(document['records'])
                prompts.append(prompt_row(method, model, corpus, predictions, failures, count, distance))
                rewrite_runs.append((label, predictions))
            self.stdout.write(self.style.SUCCESS(f'Read {path}: {method} ({len(predictions)} predictions)'))

        recalls = recall_rows(corpus, rewrite_runs or runs)
        built = tables(detection=detection, prompts=prompts, recalls=recalls)

        os.makedirs(config.output_dir, exist_ok=True)
        write_provenance(
            config.output_dir, config, corpus_provenance=self.corpus_provenance(corpus),
            notes={'results': [os.path.join(os.path.basename(os.path.dirname(path)), os.path.basename(path))
                               for path in options['results']]},
        )
        metrics = {'gold': config.gold, 'runs': len(options['results'])}
        write_report(config.output_dir, metrics, built)
        if config.xlsx:
            export_xlsx(config.output_dir, built)
        record_run(config, 'summarize', metrics)

        self.stdout.write(
            self.style.SUCCESS(f'\nSummary: Combined {len(options["results"])} runs, Output {config.output_dir}')
        )
