import json
import os
import shutil
import tempfile
from io import StringIO

from django.conf import settings
from django.core.management import call_command
from django.test import SimpleTestCase, TestCase

from arm.exceptions import PreconditionError
from corpus.loader import load_corpus
from corpus.schema import Subjectivity
from llmgw.backends import ScriptedBackend
from llmgw.runner import RunOptions

from .exceptions import MissingVariantError
from .generate import Direction, generate_variant, generate_variants, plan_tasks, template_for
from .splice import export_finetune_corpus, splice, write_spliced

RESOURCES = os.path.join(settings.BASE_DIR, 'resources')
MINI_CORPUS = os.path.join(RESOURCES, 'mini_corpus.json')
MINI_SCRIPT = os.path.join(RESOURCES, 'mini_script.json')


class GenerateTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.corpus = load_corpus(MINI_CORPUS)
        cls.options = RunOptions(model='claude-3-5-sonnet-20240620')
        cls.single = generate_variants(cls.corpus, ScriptedBackend.from_file(MINI_SCRIPT), 7, cls.options)

    def test_single_mode_counts(self):
        run = self.single
        self.assertEqual(len(run.variants), 9)
        self.assertEqual(run.flagged_count, 1)
        self.assertEqual(len(run.accepted), 8)
        directions = [variant.direction for variant in run.variants]
        self.assertEqual(directions.count(Direction.TO_OBJECTIVE), 4)
        self.assertEqual(directions.count(Direction.TO_SUBJECTIVE), 5)

    def test_unchanged_variant_is_flagged_after_retry(self):
        flagged = next(variant for variant in self.single.variants if variant.flagged)
        self.assertEqual(flagged.source_claim_id, 'c1-3')
        self.assertEqual(len(flagged.raw_responses), 2)
        self.assertEqual(flagged.flag_reason, 'unchanged')

    def test_multi_sentence_variant_is_flagged(self):
        backend = ScriptedBackend.constant('<sentence>Mara guards the light. She never sleeps.</sentence>')
        context = self.corpus.context('c1-1')
        variant = generate_variant(backend, context.story, context.summary, context.claim,
                                   Direction.TO_SUBJECTIVE, 1, self.options)
        self.assertTrue(variant.flagged)
        self.assertEqual(variant.flag_reason, 'multi_sentence')
        self.assertFalse(variant.accepted)

        run = generate_variants(self.corpus, backend, 7, self.options)
        self.assertEqual(len(run.accepted), 0)
        self.assertEqual({v.flag_reason for v in run.variants}, {'multi_sentence'})

    def test_all_mode_counts(self):
        run = generate_variants(self.corpus, ScriptedBackend.from_file(MINI_SCRIPT), 7, self.options, type_mode='all')
        self.assertEqual(len(run.variants), 24)
        self.assertEqual(run.flagged_count, 4)

    def test_to_objective_keeps_type(self):
        variant = next(v for v in self.single.variants if v.source_claim_id == 'c2-2')
        self.assertEqual(variant.direction, Direction.TO_OBJECTIVE)
        self.assertEqual(variant.template_name, 'synth_to_objective_type2')
        self.assertEqual(variant.polarity, Subjectivity.OBJECTIVE)

    def test_type_choice_is_seeded(self):
        def types(seed):
            return [(ctx.claim.id, code) for ctx, direction, code in plan_tasks(self.corpus, seed)
                    if direction == Direction.TO_SUBJECTIVE]

        self.assertEqual(types(3), types(3))
        self.assertTrue(all(code in (1, 2, 3, 4) for _, code in types(3)))

    def test_preconditions(self):
        context = self.corpus.context('c1-1')
        backend = ScriptedBackend.from_file(MINI_SCRIPT)
        with self.assertRaises(PreconditionError):
            generate_variant(backend, context.story, context.summary, context.claim,
                             Direction.TO_OBJECTIVE, 1, self.options)
        with self.assertRaises(PreconditionError):
            template_for(Direction.TO_SUBJECTIVE, 5)


class SpliceTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.corpus = load_corpus(MINI_CORPUS)
        options = RunOptions(model='claude-3-5-sonnet-20240620')
        cls.synth_run = generate_variants(cls.corpus, ScriptedBackend.from_file(MINI_SCRIPT), 7, options)

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_missing_variant(self):
        with self.assertRaises(MissingVariantError) as ctx:
            splice(self.corpus, self.synth_run.variants, seed=7)
        self.assertEqual((ctx.exception.summary_id, ctx.exception.position), ('sum-1', 2))
        self.assertEqual(ctx.exception.polarity, 'subjective')

    def test_keep_original(self):
        spliced = splice(self.corpus, self.synth_run.variants, seed=7, on_missing='keep_original')
        self.assertEqual([item.id for item in spliced], ['sum-1-splice-7', 'sum-2-splice-7', 'sum-3-splice-7'])
        by_claim = {choice.source_claim_id: choice for item in spliced for choice in item.choices}
        self.assertIsNone(by_claim['c1-3'].polarity)
        self.assertIsNone(by_claim['c2-4'].polarity)
        self.assertEqual(by_claim['c2-4'].text, 'This is a heartwarming story about community.')
        self.assertEqual(sum(1 for choice in by_claim.values() if choice.polarity), 8)

    def test_splice_is_deterministic(self):
        first = splice(self.corpus, self.synth_run.variants, seed=11, on_missing='keep_original')
        again = splice(self.corpus, reversed(self.synth_run.variants), seed=11, on_missing='keep_original')
        self.assertEqual(first, again)

    def test_chosen_text_matches_polarity(self):
        subjective_texts = {v.text for v in self.synth_run.accepted if v.direction == Direction.TO_SUBJECTIVE}
        for seed in range(5):
            for item in splice(self.corpus, self.synth_run.variants, seed=seed, on_missing='keep_original'):
                for choice in item.choices:
                    claim = self.corpus.context(choice.source_claim_id).claim
                    if choice.polarity == Subjectivity.SUBJECTIVE and claim.subjectivity == Subjectivity.OBJECTIVE:
                        self.assertIn(choice.text, subjective_texts)
                    if choice.polarity == claim.subjectivity:
                        self.assertEqual(choice.text, claim.text)

    def test_write_spliced(self):
        spliced = splice(self.corpus, self.synth_run.variants, seed=7, on_missing='keep_original')
        path = os.path.join(self.tmp, 'spliced.json')
        write_spliced(self.corpus, spliced, path, {'file': 'provenance.json'})
        with open(path, encoding='utf-8') as f:
            document = json.load(f)
        claims = [claim for summary in document['summaries'] for claim in summary['claims']]
        self.assertEqual(len(claims), 10)
        self.assertEqual(
            [claim['expected_polarity'] for claim in claims],
            [p for item in spliced for p in item.expected_polarities],
        )

    def test_finetune_export_is_stable(self):
        first = os.path.join(self.tmp, 'a.jsonl')
        second = os.path.join(self.tmp, 'b.jsonl')
        self.assertEqual(export_finetune_corpus(self.corpus, self.synth_run.variants, first), 8)
        export_finetune_corpus(self.corpus, tuple(reversed(self.synth_run.variants)), second)
        with open(first, 'rb') as a, open(second, 'rb') as b:
            self.assertEqual(a.read(), b.read())

        with open(first, encoding='utf-8') as f:
            records = [json.loads(line) for line in f]
        self.assertEqual(sorted(records[0]), ['claim', 'label', 'story', 'summary'])
        self.assertEqual(sum(1 for record in records if record['label'] == 'subjective'), 4)
        aliens = next(record for record in records if record['claim'].startswith('A strange figure'))
        self.assertIn(aliens['claim'], aliens['summary'])
        self.assertNotIn('Aliens', aliens['summary'])


class RunSynthCommandTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_record_run(self):
        out_dir = os.path.join(self.tmp, 'synth')
        out = StringIO()
        call_command(
            'run_synth', '--corpus', MINI_CORPUS, '--model', 'claude-3-5-sonnet-20240620',
            '--mode', 'record', '--cache', os.path.join(self.tmp, 'cache'), '--script', MINI_SCRIPT,
            '--seed', '7', '--out', out_dir, stdout=out,
        )
        self.assertIn('Summary: Variants 8, Flagged 1, Failed 0, Spliced 3, Exported 8', out.getvalue())
        for name in ('provenance.json', 'results.json', 'spliced_corpus.json', 'finetune.jsonl', 'report.json'):
            self.assertTrue(os.path.exists(os.path.join(out_dir, name)), name)
