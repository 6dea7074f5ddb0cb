import os
import shutil
import tempfile
from dataclasses import replace

from django.test import SimpleTestCase

from .backends import CachedBackend, LlmRequest, ScriptedBackend, ask_tagged, build_backend, complete
from .cache import ReplayCache
from .exceptions import CacheMissError, ExtractionError, GatewayError, MissingBindingError, TemplateError, TransportError
from .extract import Arity, extract_tagged, parse_yes_no, strip_tagged, wrap
from .runner import run_bounded
from .templates import TEMPLATE_NAMES, load_template, parse_template, render

EXPECTED_SLOTS = {
    'rewrite_both': ('story', 'summary', 'claim'),
    'baseline_zero_shot': ('story', 'summary', 'claim'),
    'baseline_self_consistency': ('story', 'summary', 'claim'),
    'explanation_parse': ('explanation',),
    'explanation_generate': ('story', 'summary', 'claim', 'rewrite'),
    'synth_to_subjective_type2': ('story', 'claim'),
}

GOLDEN_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'golden')
GOLDEN_BINDINGS = {
    'story': 'STORY TEXT',
    'summary': 'SUMMARY TEXT',
    'claim': 'CLAIM TEXT',
    'explanation': 'EXPLANATION TEXT',
    'rewrite': 'REWRITE TEXT',
}


def read_golden(name):
    with open(os.path.join(GOLDEN_DIR, f'{name}.txt'), encoding='utf-8', newline='') as f:
        text = f.read()
    return text[:-1] if text.endswith('\n') else text


def rendered(name):
    template = load_template(name)
    system, user = render(template, {slot: GOLDEN_BINDINGS[slot] for slot in template.slot_names})
    return f'SYSTEM: {system}\nUSER: {user}' if system else user


class TemplateTests(SimpleTestCase):

    def test_every_template_loads(self):
        for name in TEMPLATE_NAMES:
            with self.subTest(name=name):
                template = load_template(name)
                self.assertTrue(template.user)
                self.assertNotIn('%s', template.user)

    def test_slot_names(self):
        for name, slots in EXPECTED_SLOTS.items():
            with self.subTest(name=name):
                self.assertEqual(load_template(name).slot_names, slots)

    def test_zero_shot_render(self):
        system, user = render(load_template('baseline_zero_shot'), {'story': 'S', 'summary': 'M', 'claim': 'C'})
        self.assertTrue(system.startswith('You are an expert summary evaluator'))
        self.assertTrue(user.startswith('Story:\nS\n\nSummary:\nM\n\n'))
        self.assertIn('Consider the following claim in the summary: C\nIs this claim objective to evaluate?', user)
        self.assertNotIn('{', user)

    def test_rewrite_render_ends_with_claim(self):
        _, user = render(load_template('rewrite_both'), {'story': 'S', 'summary': 'M', 'claim': 'C.'})
        self.assertTrue(user.endswith('Sentence: C.'))

    def test_zero_slots(self):
        template = parse_template('plain', 'sys', 'Just text.')
        self.assertEqual(render(template, {}), ('sys', 'Just text.'))

    def test_missing_binding(self):
        with self.assertRaises(MissingBindingError) as ctx:
            render(load_template('baseline_zero_shot'), {'story': 'S', 'summary': 'M'})
        self.assertEqual(ctx.exception.slot, 'claim')

    def test_braces_in_bindings_are_left_alone(self):
        _, user = render(parse_template('t', '', 'A {claim} B {story}'), {'claim': '{story}', 'story': 'x'})
        self.assertEqual(user, 'A {story} B x')

    def test_repeated_slot_rejected(self):
        with self.assertRaises(TemplateError):
            parse_template('t', '', '{claim} and {claim}')

    def test_unknown_template(self):
        with self.assertRaises(TemplateError):
            load_template('no_such_template')

    def test_renderings_match_golden_files(self):
        self.assertEqual(sorted(f[:-4] for f in os.listdir(GOLDEN_DIR)), sorted(TEMPLATE_NAMES))
        for name in TEMPLATE_NAMES:
            with self.subTest(name=name):
                self.assertEqual(rendered(name), read_golden(name))

    def test_few_shot_exemplar(self):
        _, user = render(load_template('baseline_few_shot'), GOLDEN_BINDINGS)
        # the instruction line itself carries an empty <answer></answer> pair
        answers = [span for span in extract_tagged(user, 'answer', Arity.ONE_OR_MORE) if span]
        self.assertEqual(answers, ['Yes', 'No', 'No', 'No', 'No'])
        self.assertTrue(user.startswith('Story:\nShelly and her dog were running down the street'))
        self.assertIn('Consider the following claim in the summary: The dog\'s prey drive is activated around the squirrel.', user)
        self.assertTrue(user.endswith('Consider the following claim in the summary: CLAIM TEXT\n'
                                      'Is this claim objective to evaluate? You should answer Yes or No. '
                                      'Place your answer between <answer></answer> tags.'))


class ExtractTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(extract_tagged('ok <answer>Yes</answer>', 'answer'), ['Yes'])
        self.assertEqual(extract_tagged('<item>a</item><item>b</item>', 'item', Arity.ONE_OR_MORE), ['a', 'b'])
        with self.assertRaises(ExtractionError):
            extract_tagged('no tags here', 'answer')

    def test_exactly_one_rejects_many(self):
        with self.assertRaises(ExtractionError):
            extract_tagged('<answer>a</answer><answer>b</answer>', 'answer', Arity.EXACTLY_ONE)

    def test_trims_and_spans_lines(self):
        self.assertEqual(extract_tagged('<sentence>\n  two\nlines \n</sentence>', 'sentence'), ['two\nlines'])

    def test_wrap_inverse(self):
        for text in ('Yes', 'A strange figure comes out of the fog.', 'x < y > z'):
            self.assertEqual(extract_tagged(wrap(text, 'answer'), 'answer'), [text])

    def test_strip_tagged(self):
        self.assertEqual(strip_tagged('Reasoning: fine.\n<answer>X</answer>', 'answer'), 'Reasoning: fine.')

    def test_yes_no(self):
        self.assertTrue(parse_yes_no(' YES '))
        self.assertFalse(parse_yes_no('no'))
        with self.assertRaises(ExtractionError):
            parse_yes_no('Probably')


class RequestDigestTests(SimpleTestCase):

    def test_equal_requests_equal_digests(self):
        a = LlmRequest(model='gpt-4', system='s', user='u')
        b = LlmRequest(model='gpt-4', system='s', user='u')
        self.assertEqual(a.digest, b.digest)

    def test_every_field_changes_digest(self):
        base = LlmRequest(model='gpt-4', system='s', user='u')
        variants = [
            replace(base, model='claude-3-5-sonnet'),
            replace(base, system='t'),
            replace(base, user='v'),
            replace(base, temperature=0.7),
            replace(base, max_tokens=10),
            replace(base, sample_index=1),
            replace(base, attempt=1),
        ]
        digests = {request.digest for request in variants}
        self.assertEqual(len(digests), len(variants))
        self.assertNotIn(base.digest, digests)


class BackendTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_scripted_rules(self):
        backend = ScriptedBackend(rules=[
            {'contains': ['claim'], 'sample_index': 1, 'response': 'second'},
            {'contains': ['claim'], 'response': 'first'},
        ])
        request = LlmRequest(model='m', system='', user='a claim')
        self.assertEqual(complete(backend, request).raw_text, 'first')
        self.assertEqual(complete(backend, replace(request, sample_index=1)).raw_text, 'second')
        with self.assertRaises(TransportError):
            complete(backend, replace(request, user='nothing'))

    def test_record_then_replay(self):
        cache = ReplayCache(self.tmp)
        calls = []

        def responder(request):
            calls.append(request)
            return f'<answer>{request.user}</answer>'

        recorder = CachedBackend(ScriptedBackend(responder=responder), cache, mode='record')
        request = LlmRequest(model='m', system='s', user='hello')
        first = recorder.complete(request)
        self.assertFalse(first.cached)
        self.assertEqual(len(cache), 1)

        replayer = CachedBackend(None, ReplayCache(self.tmp), mode='replay')
        again = replayer.complete(request)
        self.assertTrue(again.cached)
        self.assertEqual(again.raw_text, first.raw_text)
        self.assertEqual(len(calls), 1)

        with self.assertRaises(CacheMissError) as ctx:
            replayer.complete(replace(request, user='unseen'))
        self.assertEqual(ctx.exception.digest, replace(request, user='unseen').digest)

    def test_cache_digest_tracks_content(self):
        cache = ReplayCache(self.tmp)
        cache.put(LlmRequest(model='m', system='', user='a'), 'x', 'scripted')
        first = cache.digest()
        self.assertEqual(first, ReplayCache(self.tmp).digest())
        cache.put(LlmRequest(model='m', system='', user='b'), 'y', 'scripted')
        self.assertNotEqual(first, cache.digest())

    def test_replay_needs_cache(self):
        with self.assertRaises(GatewayError):
            build_backend('gpt-4', mode='replay', cache_dir=self.tmp + '/missing')

    def test_ask_tagged_reasks_once(self):
        backend = ScriptedBackend(responder=lambda request: '<answer>No</answer>' if request.attempt else 'garbled')
        answer = ask_tagged(backend, LlmRequest(model='m', system='', user='u'), 'answer', parse=parse_yes_no)
        self.assertEqual(answer.values, [False])
        self.assertEqual(answer.raw_responses, ('garbled', '<answer>No</answer>'))

    def test_ask_tagged_gives_up(self):
        backend = ScriptedBackend.constant('<answer>Maybe</answer>')
        with self.assertRaises(ExtractionError) as ctx:
            ask_tagged(backend, LlmRequest(model='m', system='', user='u'), 'answer', parse=parse_yes_no)
        self.assertEqual(len(ctx.exception.raw_responses), 2)

    def test_empty_span_is_malformed(self):
        backend = ScriptedBackend.constant('<answer> </answer>')
        with self.assertRaises(ExtractionError):
            ask_tagged(backend, LlmRequest(model='m', system='', user='u'), 'answer')


class RunnerTests(SimpleTestCase):

    def test_keeps_order(self):
        items = list(range(50))
        self.assertEqual(run_bounded(lambda x: x * 2, items, parallelism=8), [x * 2 for x in items])
        self.assertEqual(run_bounded(lambda x: x * 2, items, parallelism=1), [x * 2 for x in items])
