import random
from functools import lru_cache

from django.test import SimpleTestCase

from .distance import compare, is_rewritten, normalize, normalized_edit_distance, word_edit_distance

VOCABULARY = ('the', 'cat', 'dog', 'sat', 'ran', 'quiet', 'fog', 'mara')


def reference_distance(a, b):
    """Plain recursive Levenshtein, only usable on short sequences."""

    @lru_cache(maxsize=None)
    def solve(i, j):
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        if a[i] == b[j]:
            return solve(i + 1, j + 1)
        return 1 + min(solve(i + 1, j), solve(i, j + 1), solve(i + 1, j + 1))

    return solve(0, 0)


def random_tokens(rng, max_length=8):
    return tuple(rng.choice(VOCABULARY) for _ in range(rng.randint(0, max_length)))


class NormalizeTests(SimpleTestCase):

    def test_porter_stemming(self):
        self.assertEqual(normalize('Running dogs RAN'), ('run', 'dog', 'ran'))

    def test_empty(self):
        self.assertEqual(normalize(''), ())

    def test_fixed_point(self):
        self.assertEqual(normalize('the the the'), ('the', 'the', 'the'))

    def test_punctuation_and_whitespace(self):
        self.assertEqual(normalize('  "Cats,"   sat —  quietly. '), normalize('cats sat quietly'))
        for token in normalize('A storm, in June... flattens “half” the plants!'):
            self.assertTrue(token)
            self.assertFalse(any(ch.isspace() for ch in token))


class EditDistanceTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(word_edit_distance(('the', 'cat', 'sat'), ('the', 'cat', 'sat')), 0)
        self.assertEqual(word_edit_distance(('the', 'cat', 'sat'), ('the', 'dog', 'sat', 'quiet')), 2)
        self.assertEqual(word_edit_distance((), ('a', 'b', 'c')), 3)
        self.assertEqual(normalized_edit_distance(('a', 'b'), ('c', 'd')), 1.0)
        self.assertEqual(normalized_edit_distance((), ()), 0.0)

    def test_matches_reference(self):
        rng = random.Random(7)
        for _ in range(500):
            a, b = random_tokens(rng), random_tokens(rng)
            self.assertEqual(word_edit_distance(a, b), reference_distance(a, b), (a, b))

    def test_metric_axioms(self):
        rng = random.Random(11)
        for _ in range(10000):
            a, b, c = random_tokens(rng), random_tokens(rng), random_tokens(rng)
            ab = word_edit_distance(a, b)
            self.assertEqual(ab, word_edit_distance(b, a))
            self.assertEqual(ab == 0, a == b)
            self.assertLessEqual(word_edit_distance(a, c), ab + word_edit_distance(b, c))
            ratio = normalized_edit_distance(a, b)
            self.assertGreaterEqual(ratio, 0.0)
            self.assertLessEqual(ratio, 1.0)


class RewrittenTests(SimpleTestCase):

    def test_echo_is_not_a_rewrite(self):
        self.assertFalse(is_rewritten('The aliens take him.', 'The aliens take him.'))
        self.assertFalse(is_rewritten('The aliens take him.', 'the ALIENS take him.'))
        self.assertFalse(is_rewritten('The aliens take him.', '  The aliens take him.\n'))

    def test_rewrite(self):
        self.assertTrue(is_rewritten('The aliens take him.', 'Strange figures take him.'))

    def test_raw_mode(self):
        self.assertTrue(is_rewritten('The aliens take him.', 'the ALIENS take him.', mode='raw'))
        self.assertFalse(is_rewritten('The aliens take him.', ' The aliens take him. ', mode='raw'))

    def test_compare(self):
        self.assertEqual(compare('Lena plants tomatoes.', 'lena plants tomatoes'), (False, 0, 0.0))
        rewritten, distance, ratio = compare('A storm destroys the garden.', 'A storm flattens half the garden.')
        self.assertTrue(rewritten)
        self.assertEqual(distance, 2)
        self.assertAlmostEqual(ratio, 2 / 6)
