"""
Word-level normalization and edit distance.

Sentences are split on whitespace, stripped of surrounding punctuation,
lowercased and Porter-stemmed; Levenshtein distance then runs over the
resulting word tokens.
"""

import string

from nltk.stem import PorterStemmer

_porter = PorterStemmer()

# ASCII punctuation plus the typographic quotes and dashes LLMs like to emit
_PUNCTUATION = string.punctuation + '“”‘’«»—–…'


def tokenize(text):
    tokens = []
    for raw in text.split():
        token = raw.strip(_PUNCTUATION)
        if token:
            tokens.append(token)
    return tokens


def normalize(text):
    """Return the normalized token sequence (a tuple) for a sentence."""
    return tuple(_porter.stem(token.lower()) for token in tokenize(text or ''))


def word_edit_distance(a, b):
    """Levenshtein distance with whole tokens as the atomic units."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)

    previous = list(range(len(b) + 1))
    for i, token_a in enumerate(a, 1):
        current = [i]
        for j, token_b in enumerate(b, 1):
            cost = 0 if token_a == token_b else 1
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + cost,
            ))
        previous = current
    return previous[-1]


def normalized_edit_distance(a, b):
    """Edit distance divided by the longer sequence length; 0.0 when both are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return word_edit_distance(a, b) / longest


def is_rewritten(original, rewrite, mode='normalized'):
    """
    Decide r != s.

    `normalized` compares token sequences, so case and whitespace echoes do
    not count as a rewrite; `raw` compares the stripped strings.
    """
    if mode == 'raw':
        return original.strip() != rewrite.strip()
    return normalize(original) != normalize(rewrite)


def compare(original, rewrite, mode='normalized'):
    """All three rewrite signals for one pair: (rewritten, distance, normalized distance)."""
    a, b = normalize(original), normalize(rewrite)
    rewritten = is_rewritten(original, rewrite, mode=mode)
    if not rewritten:
        return False, 0, 0.0
    return True, word_edit_distance(a, b), normalized_edit_distance(a, b)
