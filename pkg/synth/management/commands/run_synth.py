"""
Management command to generate synthetic claim variants, spliced summaries
and the finetuning export.

Usage:
    python manage.py run_synth --corpus resources/mini_corpus.json --model claude-3-5-sonnet-20240620 \
        --mode replay --cache cache/ --seed 7 --out runs/synth
"""

import os

from arm_eval.conf import arm_setting
from llmgw.exceptions import GatewayError
from reports.commands import PipelineCommand
from reports.store import record_run
from reports.tables import failure_record
from reports.writers import ReportTable, export_xlsx, write_provenance, write_report, write_results
from synth.exceptions import MissingVariantError
from synth.generate import TYPE_MODES, Direction, generate_variants
from synth.splice import ON_MISSING, export_finetune_corpus, splice, write_spliced


def variant_record(variant):
    return {
        'claim_id': variant.source_claim_id,
        'method': variant.template_name,
        'status': 'flagged' if variant.flagged else 'ok',
        'flag_reason': variant.flag_reason,
        'in_scope': True,
        'direction': variant.direction.value,
        'ambiguity_type': variant.ambiguity_type,
        'text': variant.text,
        'raw_responses': list(variant.raw_responses),
    }


class Command(PipelineCommand):
    help = 'Generate objective/subjective claim variants, splice summaries and export a finetuning set'
    command_name = 'synth'

    def add_arguments(self, parser):
        self.add_run_arguments(parser)
        parser.add_argument('--type-mode', choices=TYPE_MODES, default=None, help='One seeded type per claim or all four')
        parser.add_argument(
            '--on-missing', choices=ON_MISSING, default='keep_original',
            help='What a splice does at positions without both polarities'
        )

    def handle(self, *args, **options):
        type_mode = options.get('type_mode') or arm_setting('SYNTH_TYPE_MODE', 'single')
        corpus = self.load_corpus(options)
        config = self.build_config(options, method=f'synth_{type_mode}')
        backend = self.build_backend(config)
        run_options = self.run_options(config)

        try:
            run = generate_variants(corpus, backend, config.seed, run_options, type_mode=type_mode, run_id=config.run_id)
        except GatewayError as exc:
            self.fail(exc)

        self.report_failures(run.failures)
        self.check_backend_outcome(run.variants, run.failures)
        if run.flagged_count:
            self.stdout.write(self.style.WARNING(f'{run.flagged_count} variants flagged (unchanged or not a single sentence)'))

        try:
            spliced = splice(corpus, run.variants, config.seed, on_missing=options['on_missing'])
        except MissingVariantError as exc:
            self.fail(exc)

        os.makedirs(config.output_dir, exist_ok=True)
        cache_digest = self.cache_digest(config)
        provenance = write_provenance(
            config.output_dir, config, cache_digest,
            corpus_provenance=self.corpus_provenance(corpus),
            notes={'type_mode': type_mode, 'types_per_objective_claim': 1 if type_mode == 'single' else 4},
        )
        write_spliced(
            corpus, spliced, os.path.join(config.output_dir, 'spliced_corpus.json'),
            {'file': 'provenance.json', 'run_id': config.run_id, 'config_digest': provenance['config_digest']},
        )
        exported = export_finetune_corpus(corpus, run.variants, os.path.join(config.output_dir, 'finetune.jsonl'))

        records = [variant_record(variant) for variant in run.variants]
        records.extend(failure_record('synth', failure) for failure in run.failures)
        records.sort(key=lambda record: (record['claim_id'], record['method']))
        write_results(config.output_dir, run.run_id, config.method, records, extra={'model': config.model, 'seed': config.seed})

        counts = {direction: sum(1 for v in run.accepted if v.direction == direction) for direction in Direction}
        positions = sum(len(item.choices) for item in spliced)
        subjective_positions = sum(
            1 for item in spliced for polarity in item.expected_polarities if polarity == 'subjective'
        )
        table = ReportTable(
            'synthetic_variants',
            ('direction', 'accepted', 'flagged'),
            tuple(
                (direction.value, counts[direction],
                 sum(1 for v in run.variants if v.flagged and v.direction == direction))
                for direction in Direction
            ),
        )
        metrics = {
            'run_id': run.run_id,
            'model': config.model,
            'type_mode': type_mode,
            'variants': len(run.variants),
            'accepted': len(run.accepted),
            'flagged': run.flagged_count,
            'failures': len(run.failures),
            'finetune_records': exported,
            'spliced_summaries': len(spliced),
            'spliced_positions': positions,
            'spliced_subjective_positions': subjective_positions,
        }
        write_report(config.output_dir, metrics, [table])
        if config.xlsx:
            export_xlsx(config.output_dir, [table])

        record_run(
            config, 'synth', metrics,
            claim_count=len(run.variants) + len(run.failures),
            failure_count=len(run.failures), cache_digest=cache_digest,
        )
        self.stdout.write(
            self.style.SUCCESS(
                f'\nSummary: Variants {len(run.accepted)}, Flagged {run.flagged_count}, '
                f'Failed {len(run.failures)}, Spliced {len(spliced)}, Exported {exported}'
            )
        )
