"""
Shared plumbing for the pipeline management commands.

Exit codes: 1 usage/config, 2 data, 3 backend.
"""

import logging
import os

from django.core.management.base import BaseCommand, CommandError

from arm_eval.conf import arm_setting
from corpus.exceptions import ArmEvalError, CorpusError, MissingLayerError
from corpus.loader import open_corpus
from llmgw.backends import MODES, build_backend
from llmgw.cache import ReplayCache
from llmgw.exceptions import CacheMissError, GatewayError, TransportError
from llmgw.runner import RunOptions
from metrics.exceptions import MetricError
from metrics.gold import GoldLayer
from synth.exceptions import MissingVariantError

from .config import RunConfig
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


def exit_code_for(exc):
    if isinstance(exc, (TransportError, CacheMissError)):
        return EXIT_BACKEND
    if isinstance(exc, (CorpusError, MissingLayerError, MetricError, MissingVariantError)):
        return EXIT_DATA
    return EXIT_CONFIG


class PipelineCommand(BaseCommand):
    """BaseCommand with the common run flags and error translation."""

    command_name = ''

    def add_run_arguments(self, parser, model=True):
        parser.add_argument('--corpus', type=str, required=True, help='Path to the corpus file')
        parser.add_argument(
            '--format', dest='corpus_format', choices=['native', 'storysumm'], default='native',
            help='Corpus file layout'
        )
        parser.add_argument('--subjectivity', type=str, default=None, help='Subjectivity overlay for the storysumm layout')
        if model:
            parser.add_argument('--model', type=str, required=True, help='Model name, e.g. claude-3-5-sonnet-20240620 or gpt-4')
            parser.add_argument('--mode', choices=MODES, default='replay', help='live, record or replay')
            parser.add_argument('--cache', type=str, default=None, help='Replay cache directory')
            parser.add_argument('--script', type=str, default=None, help='Scripted responses file used instead of a live model')
            parser.add_argument('--parallelism', type=int, default=None, help='Concurrent model calls')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', type=str, default=None, help='Output directory')
        parser.add_argument('--xlsx', action='store_true', help='Also write report.xlsx')

    def add_gold_argument(self, parser):
        parser.add_argument(
            '--gold', choices=[layer.value for layer in GoldLayer], default=GoldLayer.SUBJECTIVITY.value,
            help='Gold layer the detections are scored against'
        )

    # ------------------------------------------------------------------

    def fail(self, exc):
        code = exit_code_for(exc)
        self.stdout.write(self.style.ERROR(str(exc)))
        raise CommandError(str(exc), returncode=code) from exc

    def build_config(self, options, method=''):
        out = options.get('out') or os.path.join(arm_setting('OUTPUT_DIR', 'runs'), self.command_name)
        parallelism = options.get('parallelism') or arm_setting('PARALLELISM', 1)
        config = RunConfig(
            command=self.command_name,
            output_dir=out,
            corpus_path=options.get('corpus') or '',
            corpus_format=options.get('corpus_format') or 'native',
            model=options.get('model') or '',
            mode=options.get('mode') or '',
            method=method,
            seed=options.get('seed') or 0,
            gold=options.get('gold') or '',
            parallelism=parallelism,
            cache_dir=options.get('cache') or arm_setting('CACHE_DIR', ''),
            script=options.get('script') or '',
            xlsx=bool(options.get('xlsx')),
        )
        try:
            return config.validate()
        except ConfigError as exc:
            self.fail(exc)

    def load_corpus(self, options):
        try:
            corpus = open_corpus(
                options['corpus'],
                fmt=options.get('corpus_format') or 'native',
                schema_version=options.get('schema_version'),
                subjectivity_path=options.get('subjectivity'),
            )
        except ArmEvalError as exc:
            self.fail(exc)
        if corpus.claim_count == 0:
            self.fail(CorpusError('Corpus has no claims'))
        self.stdout.write(
            f'Loaded {len(corpus.stories)} stories, {len(corpus.summaries)} summaries, '
            f'{corpus.claim_count} claims'
        )
        return corpus

    def build_backend(self, config):
        try:
            return build_backend(
                config.model,
                mode=config.mode,
                cache_dir=config.cache_dir,
                script=config.script or None,
            )
        except GatewayError as exc:
            # missing credentials or cache are configuration problems
            self.stdout.write(self.style.ERROR(str(exc)))
            raise CommandError(str(exc), returncode=EXIT_CONFIG) from exc

    def run_options(self, config, **overrides):
        return RunOptions.from_settings(config.model, parallelism=config.parallelism, **overrides)

    def cache_digest(self, config):
        if config.mode == 'live':
            return ''
        cache = ReplayCache(config.cache_dir)
        return cache.digest() if cache.exists() else ''

    def check_backend_outcome(self, produced, failures):
        """Exit 3 when nothing was produced and every failure came from the backend."""
        backend_failures = [failure for failure in failures if failure.stage == 'backend']
        if not produced and failures and len(backend_failures) == len(failures):
            message = f'All {len(failures)} model calls failed: {backend_failures[0].message}'
            self.stdout.write(self.style.ERROR(message))
            raise CommandError(message, returncode=EXIT_BACKEND)

    def report_failures(self, failures):
        for failure in failures:
            self.stdout.write(self.style.WARNING(f'{failure.claim_id}: {failure.stage} - {failure.message}'))

    def corpus_provenance(self, corpus):
        return {
            'source': os.path.basename(corpus.provenance.source_path),
            'adapter': corpus.provenance.adapter,
            'schema_version': corpus.provenance.schema_version,
        }
