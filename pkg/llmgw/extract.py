"""Pulling `<tag>...</tag>` answers out of model replies."""

import re
from enum import Enum

from .exceptions import ExtractionError


class Arity(str, Enum):
    EXACTLY_ONE = 'exactly_one'
    ONE_OR_MORE = 'one_or_more'


def _pattern(tag):
    escaped = re.escape(tag)
    return re.compile(rf'<{escaped}>(.*?)</{escaped}>', re.DOTALL | re.IGNORECASE)


def wrap(text, tag):
    return f'<{tag}>{text}</{tag}>'


def extract_tagged(text, tag, arity=Arity.EXACTLY_ONE):
    """Return the trimmed inner text of each `<tag>` span, in order."""
    arity = Arity(arity)
    spans = [match.strip() for match in _pattern(tag).findall(text or '')]

    if not spans:
        raise ExtractionError(f'No <{tag}> span in response')
    if arity == Arity.EXACTLY_ONE and len(spans) != 1:
        raise ExtractionError(f'Expected one <{tag}> span, found {len(spans)}')
    return spans


def strip_tagged(text, tag):
    """The reply with every `<tag>` span removed; the rewrite's reasoning text."""
    return _pattern(tag).sub('', text or '').strip()


def parse_yes_no(answer):
    """Case-insensitive Yes/No; anything else is a parse failure."""
    value = answer.strip().lower()
    if value == 'yes':
        return True
    if value == 'no':
        return False
    raise ExtractionError(f'Answer "{answer}" is neither Yes nor No')
