import os

from django.conf import settings
from django.test import SimpleTestCase

from corpus.loader import load_corpus
from llmgw.backends import ScriptedBackend
from llmgw.runner import RunOptions
from metrics.gold import gold_labels
from metrics.scores import score_detection

from .exceptions import PreconditionError
from .pipeline import (
    EXPLANATION_SOURCES, RewriteContext, RewriteVariant, arm_predictions, check_membership, explain_rewrite,
    rewrite_claim, run_arm,
)

RESOURCES = os.path.join(settings.BASE_DIR, 'resources')
MINI_CORPUS = os.path.join(RESOURCES, 'mini_corpus.json')
MINI_SCRIPT = os.path.join(RESOURCES, 'mini_script.json')


class ArmRunTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.corpus = load_corpus(MINI_CORPUS)
        cls.backend = ScriptedBackend.from_file(MINI_SCRIPT)
        cls.options = RunOptions(model='gpt-4', parallelism=3)
        cls.arm_run = run_arm(cls.corpus, cls.backend, RewriteVariant.BOTH, seed=0, options=cls.options)

    def test_every_claim_accounted_for(self):
        ids = [result.claim_id for result in self.arm_run.results] + [failure.claim_id for failure in self.arm_run.failures]
        self.assertEqual(sorted(ids), sorted(claim.id for claim in self.corpus.claims))
        self.assertEqual(self.arm_run.in_scope_claim_count, 9)

    def test_rewritten_claims(self):
        rewritten = sorted(result.claim_id for result in self.arm_run.scored_results if result.rewritten)
        self.assertEqual(rewritten, ['c1-2', 'c2-2', 'c2-3', 'c3-2'])

    def test_case_echo_is_not_rewritten(self):
        result = next(r for r in self.arm_run.results if r.claim_id == 'c3-1')
        self.assertFalse(result.rewritten)
        self.assertEqual(result.edit_distance, 0)
        self.assertEqual(result.explanation_points, ())

    def test_commentary_claim_out_of_scope(self):
        result = next(r for r in self.arm_run.results if r.claim_id == 'c2-4')
        self.assertFalse(result.in_scope)
        self.assertNotIn('c2-4', arm_predictions(self.arm_run)[0])

    def test_explanations(self):
        by_id = {result.claim_id: result for result in self.arm_run.results}
        self.assertEqual(by_id['c1-2'].explanation_size, 2)
        self.assertEqual(by_id['c2-2'].explanation_points, ("Tomas's anger is assumed, not stated.",))
        self.assertTrue(by_id['c2-3'].explanation_failed)
        self.assertEqual(by_id['c2-3'].explanation_size, 0)

    def test_summary(self):
        stats = self.arm_run.summary()
        self.assertEqual(stats['claims'], 9)
        self.assertEqual(stats['rewrite_count'], 4)
        self.assertAlmostEqual(stats['mean_explanation_size'], 4 / 3)
        self.assertEqual(stats['explanation_failures'], 1)
        self.assertGreater(stats['mean_normalized_edit_distance'], 0.0)
        self.assertLessEqual(stats['mean_normalized_edit_distance'], 1.0)

    def test_detection_against_subjectivity(self):
        predictions, failures = arm_predictions(self.arm_run)
        self.assertEqual(failures, 0)
        score = score_detection(predictions, gold_labels(self.corpus, 'subjectivity'))
        self.assertAlmostEqual(score.balanced_accuracy, 77.5)
        self.assertAlmostEqual(score.f1_macro, 0.775)
        self.assertEqual(score.counts.as_dict(), {'tp': 3, 'fp': 1, 'tn': 4, 'fn': 1})

    def test_detection_against_either_layer(self):
        predictions, _ = arm_predictions(self.arm_run)
        score = score_detection(predictions, gold_labels(self.corpus, 'subj_or_unfaith'))
        self.assertAlmostEqual(score.balanced_accuracy, 90.0)

    def test_rerun_is_identical(self):
        again = run_arm(self.corpus, self.backend, 'both', seed=0, options=RunOptions(model='gpt-4'))
        self.assertEqual(again.results, self.arm_run.results)


class ArmEdgeCaseTests(SimpleTestCase):

    def setUp(self):
        self.corpus = load_corpus(MINI_CORPUS)
        self.options = RunOptions(model='gpt-4')

    def test_generated_explanations(self):
        options = RunOptions(model='gpt-4', explanation_source='generate')
        run = run_arm(self.corpus, ScriptedBackend.from_file(MINI_SCRIPT), 'both', seed=0, options=options)
        stats = run.summary()
        self.assertEqual(stats['explanation_failures'], 0)
        self.assertEqual(stats['mean_explanation_size'], 1.0)

    def test_unparseable_rewrites(self):
        run = run_arm(self.corpus, ScriptedBackend.constant('I would not change it.'), 'both', 0, self.options)
        self.assertEqual(run.results, ())
        self.assertEqual(run.failure_count, 9)
        self.assertEqual({failure.stage for failure in run.failures}, {'parse_failed'})
        self.assertEqual(len(run.failures[0].raw_responses), 2)

    def test_backend_failures(self):
        run = run_arm(self.corpus, ScriptedBackend(), 'subjectivity_focused', 0, self.options)
        self.assertEqual({failure.stage for failure in run.failures}, {'backend'})
        self.assertEqual(run.method, 'arm_subjectivity_focused')

    def test_claim_from_another_summary(self):
        first, second = self.corpus.summaries[0], self.corpus.summaries[1]
        with self.assertRaises(PreconditionError):
            check_membership(self.corpus.story(first.story_id), first, second.claims[0])

    def test_rewrite_claim_returns_raw_reply(self):
        context = self.corpus.context('c1-2')
        text, raw = rewrite_claim(
            ScriptedBackend.from_file(MINI_SCRIPT), context.story, context.summary, context.claim, 'both', self.options,
        )
        self.assertEqual(text, 'A strange figure comes out of the fog, and Mara is gone by morning.')
        self.assertTrue(raw.startswith('Reasoning:'))

    def test_variant_templates(self):
        self.assertEqual(RewriteVariant('inconsistency_focused').template_name, 'rewrite_inconsistency')
        self.assertEqual(RewriteVariant.BOTH.template_name, 'rewrite_both')

    def test_unknown_explanation_source(self):
        context = self.corpus.context('c1-2')
        rewrite = RewriteContext(context.story, context.summary, context.claim, 'A figure appears.', 'Reasoning: x')
        options = RunOptions(model='gpt-4', explanation_source='annotated')
        with self.assertRaises(PreconditionError):
            explain_rewrite(ScriptedBackend.from_file(MINI_SCRIPT), rewrite, options)
        self.assertEqual(EXPLANATION_SOURCES, ('response', 'generate'))
