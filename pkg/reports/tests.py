import json
import os
import shutil
import tempfile
from io import StringIO

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from .admin import RunRecordAdmin
from .config import RunConfig
from .exceptions import ConfigError
from .models import ClaimOutcome, RunRecord
from .writers import ReportTable, format_cell, render_text

RESOURCES = os.path.join(settings.BASE_DIR, 'resources')
MINI_CORPUS = os.path.join(RESOURCES, 'mini_corpus.json')
MINI_SCRIPT = os.path.join(RESOURCES, 'mini_script.json')

DETERMINISTIC_FILES = ('provenance.json', 'results.json', 'report.json', 'report.csv', 'report.txt')


def read_bytes(path):
    with open(path, 'rb') as f:
        return f.read()


def read_json(path):
    with open(path, encoding='utf-8') as f:
        return json.load(f)


class RunConfigTests(SimpleTestCase):

    def test_digest_ignores_output_location(self):
        a = RunConfig(command='arm', output_dir='runs/a', corpus_path=MINI_CORPUS, model='gpt-4', parallelism=1)
        b = RunConfig(command='arm', output_dir='elsewhere/b', corpus_path=MINI_CORPUS, model='gpt-4', parallelism=8)
        self.assertEqual(a.digest, b.digest)
        self.assertEqual(a.run_id, b.run_id)
        self.assertTrue(a.run_id.startswith('arm-gpt-4-0-'))

    def test_digest_tracks_inputs(self):
        a = RunConfig(command='arm', output_dir='runs', corpus_path=MINI_CORPUS, model='gpt-4')
        self.assertNotEqual(a.digest, RunConfig(command='arm', output_dir='runs', corpus_path=MINI_CORPUS,
                                                model='gpt-4', seed=1).digest)
        self.assertEqual(a.hashed_fields()['corpus_path'], 'mini_corpus.json')
        self.assertIn('corpus_sha256', a.hashed_fields())

    def test_validate(self):
        tmp = tempfile.mkdtemp()
        try:
            with self.assertRaises(ConfigError):
                RunConfig(command='arm', output_dir='runs', mode='replay', cache_dir=tmp).validate()
            with self.assertRaises(ConfigError):
                RunConfig(command='arm', output_dir='runs', mode='live', parallelism=0).validate()
        finally:
            shutil.rmtree(tmp)


class WriterTests(SimpleTestCase):

    def test_format_cell(self):
        self.assertEqual(format_cell(None), '')
        self.assertEqual(format_cell(True), 'yes')
        self.assertEqual(format_cell(77.5), '77.50')
        self.assertEqual(format_cell(4), '4')

    def test_render_text(self):
        table = ReportTable('detection', ('method', 'balanced_accuracy'), (('arm_both', 77.5), ('zero_shot', None)))
        self.assertEqual(
            render_text([table]),
            'provenance: provenance.json\n'
            '\n'
            'detection\n'
            'method     balanced_accuracy\n'
            '---------  -----------------\n'
            'arm_both   77.50\n'
            'zero_shot\n',
        )


class RunRecordTests(SimpleTestCase):

    def test_failure_rate(self):
        self.assertEqual(RunRecord(claim_count=8, failure_count=2).failure_rate, 25.0)
        self.assertEqual(RunRecord(claim_count=0, failure_count=0).failure_rate, 0.0)
        self.assertIn('failure_rate', RunRecordAdmin.list_display)


class RecordReplayTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.cache = os.path.join(self.tmp, 'cache')

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def arm(self, name, *extra):
        out_dir = os.path.join(self.tmp, name)
        out = StringIO()
        call_command(
            'run_arm', '--corpus', MINI_CORPUS, '--model', 'claude-3-5-sonnet-20240620',
            '--cache', self.cache, '--variant', 'both', '--out', out_dir, *extra, stdout=out,
        )
        return out_dir, out.getvalue()

    def baseline(self, name, method, *extra):
        out_dir = os.path.join(self.tmp, name)
        call_command(
            'run_baseline', '--method', method, '--corpus', MINI_CORPUS, '--model', 'claude-3-5-sonnet-20240620',
            '--cache', self.cache, '--out', out_dir, *extra, stdout=StringIO(),
        )
        return out_dir

    def test_replay_is_byte_identical(self):
        recorded, output = self.arm('record', '--mode', 'record', '--script', MINI_SCRIPT)
        self.assertIn('Summary: Rewritten 4', output)

        first, _ = self.arm('replay_1', '--mode', 'replay', '--parallelism', '1')
        second, _ = self.arm('replay_2', '--mode', 'replay', '--parallelism', '4')
        for name in DETERMINISTIC_FILES:
            with self.subTest(name=name):
                self.assertEqual(read_bytes(os.path.join(first, name)), read_bytes(os.path.join(second, name)))

        self.assertEqual(
            read_json(os.path.join(recorded, 'results.json'))['records'],
            read_json(os.path.join(first, 'results.json'))['records'],
        )
        report = read_json(os.path.join(first, 'report.json'))
        self.assertEqual(report['detection']['balanced_accuracy'], 77.5)
        self.assertEqual(report['rewrite_count'], 4)
        self.assertEqual(report['explanation_failures'], 1)

        provenance = read_json(os.path.join(first, 'provenance.json'))
        self.assertEqual(provenance['run_id'], report['run_id'])
        self.assertTrue(provenance['cache_digest'])

        self.assertEqual(RunRecord.objects.filter(command='arm').count(), 2)
        replayed = RunRecord.objects.get(run_id=report['run_id'])
        self.assertEqual(replayed.outcomes.count(), 10)
        self.assertEqual(ClaimOutcome.objects.filter(run=replayed, flagged=True).count(), 4)

    def test_replay_miss_exits_with_backend_code(self):
        self.baseline('zero_shot', 'zero_shot', '--mode', 'record', '--script', MINI_SCRIPT)
        with self.assertRaises(CommandError) as ctx:
            self.arm('arm', '--mode', 'replay')
        self.assertEqual(ctx.exception.returncode, 3)

    def test_replay_without_cache(self):
        with self.assertRaises(CommandError) as ctx:
            self.arm('arm', '--mode', 'replay')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_xlsx_export(self):
        out_dir, _ = self.arm('record', '--mode', 'record', '--script', MINI_SCRIPT, '--xlsx')
        self.assertTrue(os.path.exists(os.path.join(out_dir, 'report.xlsx')))

    def test_summarize_runs(self):
        arm_dir, _ = self.arm('arm_both', '--mode', 'record', '--script', MINI_SCRIPT)
        zero_dir = self.baseline('zero_shot', 'zero_shot', '--mode', 'record', '--script', MINI_SCRIPT)
        out_dir = os.path.join(self.tmp, 'summary')
        out = StringIO()
        call_command(
            'summarize_runs', os.path.join(arm_dir, 'results.json'), os.path.join(zero_dir, 'results.json'),
            '--corpus', MINI_CORPUS, '--out', out_dir, stdout=out,
        )
        self.assertIn('Summary: Combined 2 runs', out.getvalue())

        tables = {table['name']: table for table in read_json(os.path.join(out_dir, 'report.json'))['tables']}
        detection = {row[0]: row for row in tables['detection']['rows']}
        self.assertAlmostEqual(detection['arm_both'][2], 77.5)
        self.assertAlmostEqual(detection['zero_shot'][2], 87.5)

        prompt = tables['prompt_comparison']['rows']
        self.assertEqual(len(prompt), 1)
        method, _, subj, unfaith, either, rewrites, _ = prompt[0]
        self.assertEqual((method, rewrites), ('arm_both', 4))
        self.assertAlmostEqual(subj, 77.5)
        self.assertAlmostEqual(either, 90.0)
        self.assertAlmostEqual(unfaith, 50.0 * (1 + 5 / 6))

        recall = tables['recall_by_type']['rows']
        self.assertEqual(recall, [['arm_both', 0.0, 1.0, 1.0, 1.0]])

    def test_explanation_source_choices(self):
        with self.assertRaises(CommandError):
            self.arm('arm', '--mode', 'record', '--script', MINI_SCRIPT, '--explanations', 'annotated')
