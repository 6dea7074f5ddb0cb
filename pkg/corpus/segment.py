"""
Rule-based sentence segmentation for summaries that are not pre-split.

Boundaries are `.`, `!` or `?` (optionally followed by closing quotes or
brackets) followed by whitespace and a token that can open a sentence. A
period after a known abbreviation or an initial inside a name is not a
boundary.
"""

import re
from functools import lru_cache
from pathlib import Path

RESOURCES_DIR = Path(__file__).resolve().parent.parent / 'resources'
ABBREVIATIONS_FILE = RESOURCES_DIR / 'abbreviations.txt'
SENTENCE_STARTERS_FILE = RESOURCES_DIR / 'sentence_starters.txt'

_BOUNDARY = re.compile(r'[.!?]+["\'”’)\]]*(?=\s)')
_LAST_WORD = re.compile(r'(\S+)$')
_NEXT_WORD = re.compile(r'\s*(\S+)')
_INITIAL = re.compile(r'[A-Z]\.')
_SENTENCE_OPENERS = '"\'“‘(['


def _read_word_list(path):
    words = set()
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            words.add(line.lower().rstrip('.'))
    return frozenset(words)


@lru_cache(maxsize=1)
def load_abbreviations(path=ABBREVIATIONS_FILE):
    """Read the abbreviation list (one per line, `#` comments)."""
    return _read_word_list(path)


@lru_cache(maxsize=1)
def load_sentence_starters(path=SENTENCE_STARTERS_FILE):
    return _read_word_list(path)


def _is_initial(text, word_start, period, segment_start):
    """
    A lone capital before a period is an initial only inside a name: before
    another initial ("J. R. Smith"), or after a capitalized word or initial
    when the next word is not a common sentence opener ("John F. Kennedy"
    but not "Agent K. Nobody knew").
    """
    letter = text[period - 1]
    if letter == 'I':
        return False
    head = text[segment_start:word_start]
    if not head.strip():
        return False

    following = _NEXT_WORD.match(text, period + 1)
    next_word = following.group(1) if following else ''
    if _INITIAL.fullmatch(next_word):
        return True

    previous = head.split()[-1].lstrip(_SENTENCE_OPENERS)
    after_name = _INITIAL.fullmatch(previous) or (previous[:1].isupper() and previous.isalpha())
    if not after_name or not next_word:
        return False
    return next_word.lstrip(_SENTENCE_OPENERS).rstrip('.,;:!?').lower() not in load_sentence_starters()


def _ends_with_abbreviation(text, start, segment_start):
    """True when the period at `start` closes an abbreviation or an initial."""
    if text[start] != '.':
        return False
    match = _LAST_WORD.search(text, segment_start, start)
    if not match:
        return False
    word = match.group(1).lstrip(_SENTENCE_OPENERS)
    if word.lower() in load_abbreviations():
        return True
    if len(word) == 1 and word.isalpha() and word.isupper():
        return _is_initial(text, match.start(), start, segment_start)
    return False


def _opens_sentence(text, end):
    following = text[end:].lstrip()[:1]
    return bool(following) and (following.isupper() or following.isdigit() or following in _SENTENCE_OPENERS)


def segment_sentences(text):
    """Split summary text into sentences; falls back to a single segment."""
    text = text.strip()
    if not text:
        return []

    segments = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        end = match.end()
        if _ends_with_abbreviation(text, match.start(), start):
            continue
        if not _opens_sentence(text, end):
            continue
        segment = text[start:end].strip()
        if segment:
            segments.append(segment)
        start = end

    tail = text[start:].strip()
    if tail:
        segments.append(tail)
    return segments or [text]
