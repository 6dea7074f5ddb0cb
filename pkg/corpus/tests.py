import json
import os
import shutil
import tempfile
from io import StringIO

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from .counts import CountAxis, count_labels
from .exceptions import CorpusError, DanglingReferenceError, MissingLayerError
from .loader import load_corpus, load_storysumm, parse_corpus, write_corpus
from .schema import FaithStatus, Subjectivity
from .segment import segment_sentences

MINI_CORPUS = os.path.join(settings.BASE_DIR, 'resources', 'mini_corpus.json')

# text -> expected segments
SEGMENTER_FIXTURE = [
    ('A. B.', ['A.', 'B.']),
    ('Mr. Darcy left. She stayed.', ['Mr. Darcy left.', 'She stayed.']),
    ('no terminal punctuation', ['no terminal punctuation']),
    ('She wrote to J. R. Smith. He never replied.', ['She wrote to J. R. Smith.', 'He never replied.']),
    ('John F. Kennedy spoke. Crowds cheered.', ['John F. Kennedy spoke.', 'Crowds cheered.']),
    ('She chose plan B. He disagreed.', ['She chose plan B.', 'He disagreed.']),
    ('The letter was signed by Agent K. Nobody knew him.',
     ['The letter was signed by Agent K.', 'Nobody knew him.']),
    ('Tomas left, and so did I. The bakery closed.', ['Tomas left, and so did I.', 'The bakery closed.']),
    ('They met at St. Ives. The sea was calm.', ['They met at St. Ives.', 'The sea was calm.']),
    ('Is it over? Yes. It is.', ['Is it over?', 'Yes.', 'It is.']),
    ('He shouted "Stop!" Then he ran.', ['He shouted "Stop!"', 'Then he ran.']),
    ('It cost 5 dollars. 3 people paid.', ['It cost 5 dollars.', '3 people paid.']),
    ('Wait... what happened?', ['Wait... what happened?']),
    ('Dr. Lee arrived at 5 p.m. on Monday. Everyone cheered.',
     ['Dr. Lee arrived at 5 p.m. on Monday.', 'Everyone cheered.']),
    ('Prof. Adams and Mrs. Hale argued. Nobody won!', ['Prof. Adams and Mrs. Hale argued.', 'Nobody won!']),
    ('The fog rolled in (slowly). Mara waited.', ['The fog rolled in (slowly).', 'Mara waited.']),
    ('It was cold, e.g. the lake froze. Birds left.', ['It was cold, e.g. the lake froze.', 'Birds left.']),
    ('She saw him.  "Run," he said.', ['She saw him.', '"Run," he said.']),
    ('Tomas baked bread.\nThe oven broke.', ['Tomas baked bread.', 'The oven broke.']),
    ('Why?! Nobody knows.', ['Why?!', 'Nobody knows.']),
    ('The mayor, i.e. Mr. Stone, resigned. Then it rained.',
     ['The mayor, i.e. Mr. Stone, resigned.', 'Then it rained.']),
    ('Lena planted tomatoes in the spring.', ['Lena planted tomatoes in the spring.']),
    ('It ended vs. the old team. They lost.', ['It ended vs. the old team.', 'They lost.']),
    ('  Padded text.  ', ['Padded text.']),
]


def corpus_document(**claim_overrides):
    claim = {
        'id': 'c1',
        'text': 'Mara keeps the lighthouse.',
        'faithfulness_labels': [{'annotator_id': 'a1', 'value': 'faithful'}],
        'subjectivity': 'objective',
    }
    claim.update(claim_overrides)
    return {
        'schema_version': '1',
        'stories': [{'id': 's1', 'title': 'T', 'text': 'Mara kept the lighthouse.'}],
        'summaries': [{'id': 'sum1', 'story_id': 's1', 'writer': 'gpt-4', 'claims': [claim]}],
    }


class SegmenterTests(SimpleTestCase):

    def test_fixture(self):
        for text, expected in SEGMENTER_FIXTURE:
            with self.subTest(text=text):
                self.assertEqual(segment_sentences(text), expected)

    def test_segments_cover_input(self):
        for text, _ in SEGMENTER_FIXTURE:
            with self.subTest(text=text):
                segments = segment_sentences(text)
                self.assertTrue(all(segments))
                self.assertEqual(''.join(''.join(segments).split()), ''.join(text.split()))

    def test_idempotent(self):
        for text, _ in SEGMENTER_FIXTURE:
            for segment in segment_sentences(text):
                with self.subTest(segment=segment):
                    self.assertEqual(segment_sentences(segment), [segment])

    def test_empty_text(self):
        self.assertEqual(segment_sentences('   '), [])


class LoaderTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write(self, name, content):
        path = os.path.join(self.tmp, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(content if isinstance(content, str) else json.dumps(content))
        return path

    def test_mini_corpus(self):
        corpus = load_corpus(MINI_CORPUS)
        self.assertEqual(len(corpus.stories), 3)
        self.assertEqual(len(corpus.summaries), 3)
        self.assertEqual(corpus.claim_count, 10)
        self.assertEqual(len(corpus.in_scope_contexts()), 9)
        self.assertEqual(len(corpus.select('human').summaries), 1)

    def test_gold_faith_majority(self):
        corpus = load_corpus(MINI_CORPUS)
        self.assertEqual(corpus.context('c1-2').claim.gold_faith, FaithStatus.UNSUPPORTED)
        self.assertEqual(corpus.context('c2-2').claim.gold_faith, FaithStatus.SUPPORTED)
        self.assertEqual(corpus.context('c2-4').claim.gold_faith, FaithStatus.NOT_APPLICABLE)
        self.assertFalse(corpus.context('c2-4').claim.in_scope)

    def test_tied_labels_are_ambiguous(self):
        document = corpus_document(faithfulness_labels=[
            {'annotator_id': 'a1', 'value': 'faithful'},
            {'annotator_id': 'a2', 'value': 'unfaithful'},
        ])
        claim = parse_corpus(document).claims[0]
        self.assertEqual(claim.gold_faith, FaithStatus.AMBIGUOUS)

    def test_round_trip(self):
        corpus = load_corpus(MINI_CORPUS)
        path = os.path.join(self.tmp, 'copy.json')
        write_corpus(corpus, path)
        self.assertEqual(load_corpus(path), corpus)

    def test_empty_file(self):
        with self.assertRaises(CorpusError):
            load_corpus(self.write('empty.json', ''))

    def test_missing_file(self):
        with self.assertRaises(CorpusError):
            load_corpus(os.path.join(self.tmp, 'absent.json'))

    def test_dangling_story(self):
        document = corpus_document()
        document['summaries'][0]['story_id'] = 'nowhere'
        with self.assertRaises(DanglingReferenceError) as ctx:
            load_corpus(self.write('dangling.json', document))
        self.assertEqual(ctx.exception.record_id, 'sum1')

    def test_duplicate_claim_id(self):
        document = corpus_document()
        claims = document['summaries'][0]['claims']
        claims.append(dict(claims[0]))
        with self.assertRaises(CorpusError) as ctx:
            parse_corpus(document)
        self.assertEqual(ctx.exception.record_id, 'c1')

    def test_multi_sentence_claim(self):
        with self.assertRaises(CorpusError) as ctx:
            parse_corpus(corpus_document(text='Mara left. She came back.'))
        self.assertIn('c1', str(ctx.exception))

    def test_claim_ending_in_capital_letter_splits(self):
        for text in ('Tomas chose plan B. Nobody objected.', 'So did I. The bakery closed.'):
            with self.subTest(text=text):
                with self.assertRaises(CorpusError):
                    parse_corpus(corpus_document(text=text))

    def test_ambiguity_type_needs_subjective(self):
        with self.assertRaises(CorpusError):
            parse_corpus(corpus_document(ambiguity_type=2))

    def test_ambiguity_type_range(self):
        with self.assertRaises(CorpusError):
            parse_corpus(corpus_document(subjectivity='subjective', ambiguity_type=6))

    def test_unknown_label(self):
        with self.assertRaises(CorpusError):
            parse_corpus(corpus_document(faithfulness_labels=[{'annotator_id': 'a1', 'value': 'maybe'}]))

    def test_schema_version_mismatch(self):
        with self.assertRaises(CorpusError):
            parse_corpus(corpus_document(), schema_version='2')

    def test_storysumm_adapter(self):
        release = self.write('storysumm.json', {
            'gpt4-1': {
                'story': 'Mara kept the lighthouse. A figure came.',
                'title': 'The Lighthouse',
                'summary': ['Mara keeps a lighthouse.', 'Aliens arrive.'],
                'model': 'gpt-4',
                'sentence-labels': ['faithful', 'unfaithful'],
            },
            'human-1': {
                'story': 'Mara kept the lighthouse. A figure came.',
                'summary': 'Mara guards the light. Someone visits.',
                'model': 'human-h1',
                'labels': [['faithful', 'unfaithful', 'faithful'], 'n/a'],
            },
        })
        overlay = self.write('subjectivity.json', {
            'gpt4-1-1': {'subjectivity': 'subjective', 'ambiguity_type': 4},
        })
        corpus = load_storysumm(release, subjectivity_path=overlay)

        self.assertEqual(len(corpus.stories), 1)
        self.assertEqual(corpus.provenance.adapter, 'storysumm')
        aliens = corpus.context('gpt4-1-1').claim
        self.assertEqual(aliens.gold_faithfulness, FaithStatus.UNSUPPORTED)
        self.assertEqual(aliens.subjectivity, Subjectivity.SUBJECTIVE)
        self.assertEqual(aliens.ambiguity_type, 4)

        human = corpus.select('human').summaries[0]
        self.assertEqual([claim.text for claim in human.claims], ['Mara guards the light.', 'Someone visits.'])
        self.assertIsNone(human.claims[0].gold_faithfulness)
        self.assertEqual(human.claims[0].gold_faith, FaithStatus.SUPPORTED)
        self.assertEqual(human.claims[1].gold_faith, FaithStatus.NOT_APPLICABLE)


class CountLabelsTests(SimpleTestCase):

    def test_faith_by_subjectivity(self):
        table = count_labels(load_corpus(MINI_CORPUS), CountAxis.FAITH_SUBJECTIVITY)
        self.assertEqual(table.cells, {
            'faithful/objective': 4,
            'faithful/subjective': 2,
            'unfaithful/objective': 1,
            'unfaithful/subjective': 2,
        })
        self.assertEqual(table.total, table.labeled)

    def test_ambiguity_types(self):
        table = count_labels(load_corpus(MINI_CORPUS), 'ambiguity_type')
        self.assertEqual(table.cells, {'1': 1, '2': 1, '3': 1, '4': 1})

    def test_no_subjective_claims(self):
        table = count_labels(parse_corpus(corpus_document()), CountAxis.FAITH_SUBJECTIVITY)
        self.assertEqual(table.cells['faithful/subjective'], 0)
        self.assertEqual(table.cells['unfaithful/subjective'], 0)

    def test_tied_gold_counts_as_unfaithful(self):
        document = corpus_document(faithfulness_labels=[
            {'annotator_id': 'a1', 'value': 'supported'},
            {'annotator_id': 'a2', 'value': 'unsupported'},
            {'annotator_id': 'a3', 'value': 'not_applicable'},
        ])
        table = count_labels(parse_corpus(document), CountAxis.FAITH_SUBJECTIVITY)
        self.assertEqual(table.cells, {
            'faithful/objective': 0,
            'faithful/subjective': 0,
            'unfaithful/objective': 1,
            'unfaithful/subjective': 0,
        })

    def test_missing_layer(self):
        document = corpus_document()
        del document['summaries'][0]['claims'][0]['subjectivity']
        corpus = parse_corpus(document)
        with self.assertRaises(MissingLayerError) as ctx:
            count_labels(corpus, CountAxis.FAITH_SUBJECTIVITY)
        self.assertEqual(ctx.exception.claim_ids, ('c1',))

        partial = count_labels(corpus, CountAxis.FAITH_SUBJECTIVITY, strict=False)
        self.assertEqual(partial.missing, ('c1',))
        self.assertEqual(partial.total, 0)


class ValidateCorpusCommandTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_validate_mini_corpus(self):
        out = StringIO()
        call_command('validate_corpus', MINI_CORPUS, '--out', self.tmp, stdout=out)
        self.assertIn('Summary: Stories 3, Summaries 3, Claims 10', out.getvalue())

        with open(os.path.join(self.tmp, 'report.json'), encoding='utf-8') as f:
            report = json.load(f)
        self.assertEqual(report['faith_subjectivity/unfaithful/subjective'], 2)
        self.assertEqual(report['ambiguity_type/4'], 1)
        self.assertEqual(report['provenance'], 'provenance.json')
        self.assertTrue(os.path.exists(os.path.join(self.tmp, 'report.csv')))

    def test_malformed_corpus(self):
        path = os.path.join(self.tmp, 'broken.json')
        with open(path, 'w', encoding='utf-8') as f:
            f.write('{"stories": [')
        with self.assertRaises(CommandError) as ctx:
            call_command('validate_corpus', path, '--out', self.tmp, stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
