import json
import os
import shutil
import tempfile
from io import StringIO

from django.conf import settings
from django.core.management import call_command
from django.test import SimpleTestCase, TestCase

from corpus.loader import load_corpus
from llmgw.backends import ScriptedBackend
from llmgw.runner import RunOptions
from metrics.gold import gold_labels
from metrics.scores import score_detection
from reports.models import RunRecord

from .classify import BaselineKind, BaselineMethod, _vote, classify_claim, run_baseline

RESOURCES = os.path.join(settings.BASE_DIR, 'resources')
MINI_CORPUS = os.path.join(RESOURCES, 'mini_corpus.json')
MINI_SCRIPT = os.path.join(RESOURCES, 'mini_script.json')


class BaselineMethodTests(SimpleTestCase):

    def test_sampling_settings(self):
        sc = BaselineMethod.for_kind('self_consistency')
        self.assertEqual((sc.sample_count, sc.temperature), (3, 0.7))
        zero = BaselineMethod.for_kind(BaselineKind.ZERO_SHOT)
        self.assertEqual((zero.template_name, zero.sample_count, zero.temperature), ('baseline_zero_shot', 1, 0.0))

    def test_vote(self):
        self.assertEqual(_vote([True, True, False]), (True, False))
        self.assertEqual(_vote([False, False, True]), (False, False))
        self.assertEqual(_vote([True, False]), (False, True))


class RunBaselineTests(SimpleTestCase):

    def setUp(self):
        self.corpus = load_corpus(MINI_CORPUS)
        self.golds = gold_labels(self.corpus, 'subjectivity')
        self.options = RunOptions(model='claude-3-5-sonnet-20240620')

    def test_always_no_scores_fifty(self):
        run = run_baseline(self.corpus, ScriptedBackend.constant('<answer>No</answer>'), 'zero_shot', 0, self.options)
        self.assertTrue(all(run.prediction_map().values()))
        self.assertEqual(score_detection(run.prediction_map(), self.golds).balanced_accuracy, 50.0)

    def test_zero_shot(self):
        run = run_baseline(self.corpus, ScriptedBackend.from_file(MINI_SCRIPT), 'zero_shot', 0, self.options)
        flagged = sorted(claim_id for claim_id, value in run.prediction_map().items() if value)
        self.assertEqual(flagged, ['c1-2', 'c2-3', 'c3-3'])
        self.assertEqual(len(run.predictions), 9)
        self.assertAlmostEqual(score_detection(run.prediction_map(), self.golds).balanced_accuracy, 87.5)

    def test_few_shot_matches_zero_shot_script(self):
        backend = ScriptedBackend.from_file(MINI_SCRIPT)
        zero = run_baseline(self.corpus, backend, 'zero_shot', 0, self.options)
        few = run_baseline(self.corpus, backend, 'few_shot', 0, self.options)
        self.assertEqual(few.prediction_map(), zero.prediction_map())

    def test_self_consistency_tie(self):
        run = run_baseline(self.corpus, ScriptedBackend.from_file(MINI_SCRIPT), 'self_consistency', 0, self.options)
        self.assertEqual(run.tie_count, 1)
        tied = next(p for p in run.predictions if p.tie)
        self.assertEqual(tied.claim_id, 'c2-2')
        self.assertTrue(tied.flagged)
        self.assertEqual(tied.answers, ('Yes', 'No'))
        score = score_detection(run.prediction_map(), self.golds)
        self.assertAlmostEqual(score.balanced_accuracy, 77.5)

    def test_self_consistency_samples_differ(self):
        seen = []

        def responder(request):
            seen.append((request.sample_index, request.temperature))
            return '<answer>Yes</answer>'

        context = self.corpus.context('c1-1')
        method = BaselineMethod.for_kind('self_consistency')
        result = classify_claim(ScriptedBackend(responder=responder), method, context.story, context.summary,
                                context.claim, self.options)
        self.assertFalse(result.flagged)
        self.assertEqual(seen, [(0, 0.7), (1, 0.7), (2, 0.7)])

    def test_unparseable_answer_fails_claim(self):
        run = run_baseline(self.corpus, ScriptedBackend.constant('<answer>Perhaps</answer>'), 'few_shot', 0, self.options)
        self.assertEqual(run.predictions, ())
        self.assertEqual(run.failure_count, 9)
        self.assertEqual(run.failures[0].stage, 'parse_failed')


class RunBaselineCommandTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_record_run(self):
        out_dir = os.path.join(self.tmp, 'zero_shot')
        out = StringIO()
        call_command(
            'run_baseline', '--method', 'zero_shot', '--corpus', MINI_CORPUS, '--model', 'gpt-4',
            '--mode', 'record', '--cache', os.path.join(self.tmp, 'cache'), '--script', MINI_SCRIPT,
            '--parallelism', '2', '--out', out_dir, stdout=out,
        )
        self.assertIn('Summary: Classified 9, Flagged 3, Failed 0', out.getvalue())

        with open(os.path.join(out_dir, 'report.json'), encoding='utf-8') as f:
            report = json.load(f)
        self.assertEqual(report['detection']['balanced_accuracy'], 87.5)

        run = RunRecord.objects.get(command='baseline')
        self.assertEqual(run.outcomes.count(), 9)
        self.assertEqual(run.outcomes.filter(flagged=True).count(), 3)
