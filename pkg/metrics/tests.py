import json
import os
import random
import shutil
import tempfile
from io import StringIO

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from corpus.exceptions import CorpusError
from corpus.loader import load_corpus

from .agreement import Outcome, StudyItem, agreement_rate, faithful_majority, outcome_rate, outcomes
from .annotations import load_explanation_annotations, study_group
from .bootstrap import bootstrap_pvalue, significance_marker
from .exceptions import MetricError
from .explanations import (
    AggregationMode, AnnotatedExplanation, ExplanationLabelSet, PointLabel, aggregate_explanation_labels,
    explanation_table, majority_label, pct_important, pct_none_important, pct_none_wrong, pct_wrong,
)
from .gold import GoldLayer, gold_labels
from .recall import mean_recall_by_type, recall_by_type
from .scores import ConfusionCounts, balanced_accuracy, f1_macro, score_detection

I, N, W = PointLabel.IMPORTANT, PointLabel.NEUTRAL, PointLabel.WRONG

MINI_CORPUS = os.path.join(settings.BASE_DIR, 'resources', 'mini_corpus.json')


def reference_pct(explanations, target):
    total = 0.0
    for labels in explanations:
        count = 0
        for label in labels:
            if label == target:
                count += 1
        total += count / len(labels)
    return 100.0 * total / len(explanations)


def reference_pct_none(explanations, target):
    none = 0
    for labels in explanations:
        found = False
        for label in labels:
            if label == target:
                found = True
        if not found:
            none += 1
    return 100.0 * none / len(explanations)


def reference_scores(counts):
    recall_pos = counts.tp / (counts.tp + counts.fn)
    recall_neg = counts.tn / (counts.tn + counts.fp)

    def f1(tp, fp, fn):
        if tp == 0:
            return 0.0
        precision, recall = tp / (tp + fp), tp / (tp + fn)
        return 2 * precision * recall / (precision + recall)

    f1_pos = f1(counts.tp, counts.fp, counts.fn)
    f1_neg = f1(counts.tn, counts.fn, counts.fp)
    return 50.0 * (recall_pos + recall_neg), (f1_pos + f1_neg) / 2


class ScoreTests(SimpleTestCase):

    def test_perfect_and_inverted(self):
        golds = [True, False, True, False, False]
        self.assertEqual(balanced_accuracy(golds, golds), 100.0)
        self.assertEqual(f1_macro(golds, golds), 1.0)
        inverted = [not gold for gold in golds]
        self.assertEqual(balanced_accuracy(inverted, golds), 0.0)
        self.assertEqual(f1_macro(inverted, golds), 0.0)

    def test_confusion_example(self):
        self.assertAlmostEqual(balanced_accuracy(ConfusionCounts(tp=3, fn=1, tn=2, fp=2)), 62.5)

    def test_random_confusion_matrices(self):
        rng = random.Random(5)
        for _ in range(50):
            counts = ConfusionCounts(
                tp=rng.randint(0, 20), fn=rng.randint(0, 20), tn=rng.randint(0, 20), fp=rng.randint(0, 20),
            )
            if counts.positives == 0 or counts.negatives == 0:
                continue
            expected_ba, expected_f1 = reference_scores(counts)
            self.assertAlmostEqual(balanced_accuracy(counts), expected_ba)
            self.assertAlmostEqual(f1_macro(counts), expected_f1)
            golds, preds = counts.arrays()
            self.assertEqual(ConfusionCounts.from_labels(preds, golds), counts)

    def test_balanced_duplication(self):
        preds = [True, True, False, False, True]
        golds = [True, False, False, True, True]
        self.assertAlmostEqual(balanced_accuracy(preds * 3, golds * 3), balanced_accuracy(preds, golds))

    def test_missing_class(self):
        with self.assertRaises(MetricError):
            balanced_accuracy([True, False], [True, True])

    def test_score_detection_counts_exclusions(self):
        predictions = {'a': True, 'b': False}
        golds = {'a': True, 'b': False, 'c': True}
        score = score_detection(predictions, golds, excluded=1)
        self.assertEqual(score.scored, 2)
        self.assertEqual(score.excluded, 2)
        self.assertEqual(score.balanced_accuracy, 100.0)


class GoldLayerTests(SimpleTestCase):

    def test_layers(self):
        corpus = load_corpus(MINI_CORPUS)
        subjectivity = gold_labels(corpus, GoldLayer.SUBJECTIVITY)
        self.assertEqual(len(subjectivity), 9)
        self.assertNotIn('c2-4', subjectivity)
        faithfulness = gold_labels(corpus, 'faithfulness')
        self.assertEqual(sorted(k for k, v in faithfulness.items() if v), ['c1-2', 'c2-3', 'c3-2'])
        either = gold_labels(corpus, 'subj_or_unfaith')
        self.assertEqual(sum(either.values()), 5)


class ExplanationMetricTests(SimpleTestCase):

    def test_worked_example(self):
        explanations = [[I, I, I, N]]
        self.assertEqual(pct_important(explanations), 75.0)
        self.assertEqual(pct_none_important(explanations), 0.0)

    def test_neutral_and_wrong(self):
        explanations = [[N, N], [W]]
        self.assertEqual(pct_important(explanations), 0.0)
        self.assertEqual(pct_none_important(explanations), 100.0)
        self.assertEqual(pct_wrong(explanations), 50.0)
        self.assertEqual(pct_none_wrong(explanations), 50.0)

    def test_all_important(self):
        explanations = [ExplanationLabelSet('r1', (I, I)), ExplanationLabelSet('r2', (I,))]
        self.assertEqual(
            (pct_important(explanations), pct_none_important(explanations),
             pct_wrong(explanations), pct_none_wrong(explanations)),
            (100.0, 0.0, 0.0, 100.0),
        )

    def test_matches_reference_loop(self):
        rng = random.Random(13)
        for _ in range(1000):
            explanations = [
                [rng.choice((I, N, W)) for _ in range(rng.randint(1, 8))]
                for _ in range(rng.randint(1, 50))
            ]
            checks = (
                (pct_important(explanations), reference_pct(explanations, I)),
                (pct_none_important(explanations), reference_pct_none(explanations, I)),
                (pct_wrong(explanations), reference_pct(explanations, W)),
                (pct_none_wrong(explanations), reference_pct_none(explanations, W)),
            )
            for actual, expected in checks:
                self.assertLessEqual(abs(actual - expected), 1e-9)

    def test_empty_explanation(self):
        with self.assertRaises(MetricError):
            pct_important([[I], []])
        with self.assertRaises(MetricError):
            pct_none_wrong([])

    def test_majority_label(self):
        self.assertEqual(majority_label([I, I, W]), I)
        self.assertEqual(majority_label([I, N, W]), N)

    def test_aggregation(self):
        annotated = AnnotatedExplanation(
            rewrite_id='r1',
            points=('p0', 'p1', 'p2', 'decoy'),
            annotations={'a': (I, I, N, W), 'b': (I, N, N, W), 'c': (I, W, I, W)},
            decoys=(3,),
        )
        individual = aggregate_explanation_labels(annotated, AggregationMode.INDIVIDUAL)
        self.assertEqual([s.labels for s in individual], [(I, I, N), (I, N, N), (I, W, I)])
        majority = aggregate_explanation_labels(annotated, 'majority_vote')
        self.assertEqual(majority[0].labels, (I, N, N))

    def test_single_annotator_passes_through(self):
        annotated = AnnotatedExplanation('r1', ('p0', 'p1'), {'a': (W, I)})
        self.assertEqual(aggregate_explanation_labels(annotated)[0].labels, (W, I))
        with self.assertRaises(MetricError):
            aggregate_explanation_labels(annotated, AggregationMode.MAJORITY_VOTE)

    def test_label_count_must_match_points(self):
        with self.assertRaises(MetricError):
            AnnotatedExplanation('r1', ('p0', 'p1'), {'a': (I,)})


class AgreementTests(SimpleTestCase):

    def test_agreement_rate(self):
        items = [
            StudyItem('c1', ('faithful', 'faithful', 'faithful')),
            StudyItem('c2', ('faithful', 'unfaithful', 'faithful')),
            StudyItem('c3', ('unfaithful', 'unfaithful', 'unfaithful')),
            StudyItem('c4', ('n/a', 'n/a', 'n/a')),
        ]
        self.assertEqual(agreement_rate(items), 75.0)
        self.assertEqual(outcomes(items, Outcome.FAITHFUL), [True, True, False, False])
        self.assertEqual(outcome_rate(outcomes(items, 'agreement')), 75.0)

    def test_wrong_label_count(self):
        with self.assertRaises(MetricError) as ctx:
            agreement_rate([StudyItem('c1', ('faithful', 'faithful'))])
        self.assertIn('c1', str(ctx.exception))

    def test_unanimous_everywhere(self):
        items = [StudyItem(f'c{i}', ('supported',) * 3) for i in range(5)]
        self.assertEqual(agreement_rate(items), 100.0)
        self.assertTrue(all(faithful_majority(item) for item in items))

    def test_synonym_labels_agree(self):
        items = [
            StudyItem('c1', ('faithful', 'supported', 'faithful')),
            StudyItem('c2', ('n/a', 'na', 'not_applicable')),
        ]
        self.assertEqual(agreement_rate(items), 100.0)
        self.assertEqual(outcomes(items, Outcome.FAITHFUL), [True, False])

    def test_unknown_label(self):
        with self.assertRaises(MetricError) as ctx:
            agreement_rate([StudyItem('c7', ('faithful', 'faithful', 'maybe'))])
        self.assertIn('maybe', str(ctx.exception))

    def test_preference_needed(self):
        with self.assertRaises(MetricError):
            outcomes([StudyItem('c1', ('faithful',) * 3)], Outcome.PREFERRED)


class RecallTests(SimpleTestCase):

    def setUp(self):
        self.golds = {'a': True, 'b': True, 'c': True, 'd': False}
        self.types = {'a': 1, 'b': 1, 'c': 3}

    def test_all_detected(self):
        recalls = recall_by_type({'a': True, 'b': True, 'c': True, 'd': True}, self.golds, self.types)
        self.assertEqual(recalls, {1: 1.0, 3: 1.0})

    def test_none_detected(self):
        recalls = recall_by_type({'a': False, 'b': False, 'c': False, 'd': False}, self.golds, self.types)
        self.assertEqual(recalls, {1: 0.0, 3: 0.0})

    def test_partial_and_mean(self):
        first = recall_by_type({'a': True, 'b': False, 'c': True}, self.golds, self.types)
        self.assertEqual(first, {1: 0.5, 3: 1.0})
        self.assertEqual(mean_recall_by_type([first, {1: 1.0, 3: 0.0}]), {1: 0.75, 3: 0.5})


class BootstrapTests(SimpleTestCase):

    def test_identical_groups(self):
        group = [1, 0, 1, 1, 0, 0, 1, 0] * 5
        result = bootstrap_pvalue(group, list(group), trials=2000, seed=1)
        self.assertGreater(result.p_value, 0.5)
        self.assertEqual(bootstrap_pvalue([1] * 10, [1] * 10, trials=500).p_value, 1.0)

    def test_maximal_separation(self):
        result = bootstrap_pvalue([1] * 200, [0] * 200, trials=10000, seed=0)
        self.assertEqual(result.observed_difference, 1.0)
        self.assertLessEqual(result.p_value, 0.001)
        self.assertEqual(significance_marker(result.p_value), '**')

    def test_seeded_and_worker_independent(self):
        a = [1] * 30 + [0] * 20
        b = [1] * 20 + [0] * 30
        serial = bootstrap_pvalue(a, b, trials=5500, seed=42)
        self.assertEqual(serial, bootstrap_pvalue(a, b, trials=5500, seed=42))
        self.assertEqual(serial, bootstrap_pvalue(a, b, trials=5500, seed=42, workers=4))
        self.assertTrue(0.0 < serial.p_value <= 1.0)

    def test_empty_group(self):
        with self.assertRaises(MetricError):
            bootstrap_pvalue([], [1, 0])


class StudyFileTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.study = os.path.join(self.tmp, 'study.json')
        agree = ['faithful'] * 3
        split = ['faithful', 'unfaithful', 'faithful']
        with open(self.study, 'w', encoding='utf-8') as f:
            json.dump({'groups': {
                'objective': [{'claim_id': f'o{i}', 'labels': agree if i < 9 else split} for i in range(10)],
                'subjective': [{'claim_id': f's{i}', 'labels': agree if i < 2 else split} for i in range(10)],
            }}, f)
        self.explanations = os.path.join(self.tmp, 'explanations.json')
        with open(self.explanations, 'w', encoding='utf-8') as f:
            json.dump({'explanations': [
                {'rewrite_id': 'r1', 'points': ['p0', 'p1', 'p2', 'decoy'], 'decoys': [3],
                 'annotations': {'a': ['IMPORTANT', 'IMPORTANT', 'NEUTRAL', 'WRONG'],
                                 'b': ['important', 'neutral', 'neutral', 'wrong'],
                                 'c': ['important', 'wrong', 'important', 'wrong']}},
                {'rewrite_id': 'r2', 'points': ['p0', 'p1'],
                 'annotations': {'a': ['wrong', 'neutral'], 'b': ['neutral', 'neutral'],
                                 'c': ['important', 'neutral']}},
            ]}, f)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_study_group(self):
        name, items = study_group(f'{self.study}:subjective')
        self.assertEqual(name, 'subjective')
        self.assertEqual(agreement_rate(items), 20.0)
        with self.assertRaises(CorpusError):
            study_group(self.study)

    def test_explanation_table(self):
        table = explanation_table(load_explanation_annotations(self.explanations))
        majority = table['majority_vote']
        self.assertAlmostEqual(majority['pct_important'], 100.0 / 6)
        self.assertEqual(majority['pct_none_important'], 50.0)
        self.assertEqual(majority['pct_none_wrong'], 100.0)
        self.assertAlmostEqual(table['individual']['pct_important'], 100.0 * (2 / 3 + 1 / 3 + 2 / 3 + 0.5) / 6)

    def test_run_stats_agreement(self):
        out_dir = os.path.join(self.tmp, 'stats')
        out = StringIO()
        call_command(
            'run_stats', '--test', 'agreement', '--group-a', f'{self.study}:objective',
            '--group-b', f'{self.study}:subjective', '--trials', '2000', '--workers', '2',
            '--seed', '3', '--out', out_dir, stdout=out,
        )
        self.assertIn('Summary: Difference 70.00 points', out.getvalue())
        with open(os.path.join(out_dir, 'report.json'), encoding='utf-8') as f:
            report = json.load(f)
        self.assertEqual((report['rate_a'], report['rate_b']), (90.0, 20.0))
        self.assertLess(report['bootstrap_p_value'], 0.05)
        self.assertIn(report['significance'], ('*', '**'))

    def test_run_stats_explanations(self):
        out = StringIO()
        call_command(
            'run_stats', '--test', 'explanations', '--group-a', self.explanations,
            '--out', os.path.join(self.tmp, 'explanations'), stdout=out,
        )
        self.assertIn('Summary: Scored 2 explanations', out.getvalue())

    def test_run_stats_needs_second_group(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('run_stats', '--test', 'faithful', '--group-a', f'{self.study}:objective',
                         '--out', os.path.join(self.tmp, 'x'), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 1)
