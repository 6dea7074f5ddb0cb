"""
Management command for the human-study statistics.

Usage:
    python manage.py run_stats --test agreement --group-a studies.json:human --group-b studies.json:llm
    python manage.py run_stats --test faithful --group-a rewrites.json:original --group-b rewrites.json:rewrite
    python manage.py run_stats --test explanations --group-a explanation_labels.json
"""

import os

from arm_eval.conf import arm_setting
from corpus.exceptions import ArmEvalError
from metrics.agreement import Outcome, outcome_rate, outcomes
from metrics.annotations import load_explanation_annotations, study_group
from metrics.bootstrap import bootstrap_pvalue, significance_marker
from metrics.explanations import explanation_table
from reports.commands import PipelineCommand
from reports.store import record_run
from reports.writers import ReportTable, write_provenance, write_report

TESTS = [outcome.value for outcome in Outcome] + ['explanations']


class Command(PipelineCommand):
    help = 'Compare two annotation groups with a bootstrap test, or score explanation labels'
    command_name = 'stats'

    def add_arguments(self, parser):
        parser.add_argument('--test', choices=TESTS, required=True)
        parser.add_argument('--group-a', type=str, required=True, help='FILE[:GROUP]')
        parser.add_argument('--group-b', type=str, default=None, help='FILE[:GROUP]')
        parser.add_argument('--trials', type=int, default=None, help='Bootstrap trials')
        parser.add_argument('--workers', type=int, default=None, help='Bootstrap worker threads')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', type=str, default=None, help='Output directory')

    def handle(self, *args, **options):
        test = options['test']
        config = self.build_config(options, method=test)
        try:
            if test == 'explanations':
                metrics, table = self._explanations(options)
            else:
                metrics, table = self._compare(options, Outcome(test), config.seed)
        except ArmEvalError as exc:
            self.fail(exc)

        os.makedirs(config.output_dir, exist_ok=True)
        write_provenance(
            config.output_dir, config,
            notes={'inputs': [os.path.basename(spec) for spec in (options['group_a'], options.get('group_b')) if spec]},
        )
        write_report(config.output_dir, metrics, [table])
        record_run(config, 'stats', metrics)

    # ------------------------------------------------------------------

    def _compare(self, options, outcome, seed):
        if not options.get('group_b'):
            self.fail(ArmEvalError(f'--test {outcome.value} needs --group-b'))
        trials = options.get('trials') or arm_setting('BOOTSTRAP_TRIALS', 10000)
        workers = options.get('workers') or arm_setting('BOOTSTRAP_WORKERS', 1)

        name_a, items_a = study_group(options['group_a'])
        name_b, items_b = study_group(options['group_b'])
        values_a = outcomes(items_a, outcome)
        values_b = outcomes(items_b, outcome)
        rate_a, rate_b = outcome_rate(values_a), outcome_rate(values_b)
        result = bootstrap_pvalue(values_a, values_b, trials=trials, seed=seed, workers=workers)
        marker = significance_marker(result.p_value)

        self.stdout.write(f'{outcome.value}: {name_a} {rate_a:.2f} ({len(values_a)} claims)')
        self.stdout.write(f'{outcome.value}: {name_b} {rate_b:.2f} ({len(values_b)} claims)')
        self.stdout.write(
            self.style.SUCCESS(
                f'\nSummary: Difference {rate_a - rate_b:.2f} points, p = {result.p_value:.4g} '
                f'(two-sided, {result.trials} trials){" " + marker if marker else ""}'
            )
        )
        metrics = {
            'test': outcome.value,
            'group_a': name_a,
            'group_b': name_b,
            'n_a': len(values_a),
            'n_b': len(values_b),
            'rate_a': rate_a,
            'rate_b': rate_b,
            'significance': marker,
        }
        metrics.update({f'bootstrap_{key}': value for key, value in result.as_dict().items()})
        table = ReportTable(
            'study_comparison',
            ('test', 'group', 'claims', 'rate', 'p_value'),
            (
                (outcome.value, name_a, len(values_a), rate_a, None),
                (outcome.value, name_b, len(values_b), rate_b, result.p_value),
            ),
        )
        return metrics, table

    def _explanations(self, options):
        annotated = load_explanation_annotations(options['group_a'])
        results = explanation_table(annotated)
        rows = []
        metrics = {'test': 'explanations', 'explanations': len(annotated)}
        for mode, values in results.items():
            rows.append((mode, values['pct_important'], values['pct_none_important'],
                         values['pct_wrong'], values['pct_none_wrong']))
            metrics.update({f'{mode}/{key}': value for key, value in values.items()})
            self.stdout.write(
                f'{mode:<14} important {values["pct_important"]:.2f}  none important {values["pct_none_important"]:.2f}  '
                f'wrong {values["pct_wrong"]:.2f}  none wrong {values["pct_none_wrong"]:.2f}'
            )
        self.stdout.write(self.style.SUCCESS(f'\nSummary: Scored {len(annotated)} explanations'))
        table = ReportTable(
            'explanation_quality',
            ('aggregation', 'pct_important', 'pct_none_important', 'pct_wrong', 'pct_none_wrong'),
            tuple(rows),
        )
        return metrics, table
