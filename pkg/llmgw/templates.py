"""
Prompt templates stored as plain-text files.

A template named `foo` is `prompts/foo.user.txt` plus an optional
`prompts/foo.system.txt`. Slots are written `{story}`, `{summary}`,
`{claim}`, ... and each may appear once in the user text.
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from arm_eval.conf import arm_setting

from .exceptions import MissingBindingError, TemplateError

DEFAULT_PROMPTS_DIR = Path(__file__).resolve().parent.parent / 'prompts'

_SLOT = re.compile(r'\{([a-z_]+)\}')

REWRITE_TEMPLATES = ('rewrite_subjectivity', 'rewrite_inconsistency', 'rewrite_both')
BASELINE_TEMPLATES = ('baseline_zero_shot', 'baseline_few_shot', 'baseline_self_consistency')
SYNTH_TEMPLATES = tuple(
    f'synth_{direction}_type{code}'
    for direction in ('to_objective', 'to_subjective')
    for code in (1, 2, 3, 4)
)
EXPLANATION_TEMPLATES = ('explanation_parse', 'explanation_generate')

TEMPLATE_NAMES = REWRITE_TEMPLATES + BASELINE_TEMPLATES + SYNTH_TEMPLATES + EXPLANATION_TEMPLATES


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    system: str
    user: str
    slot_names: tuple


def _read(path):
    with open(path, 'r', encoding='utf-8', newline='') as f:
        text = f.read()
    # files end with exactly one newline that is not part of the prompt
    return text[:-1] if text.endswith('\n') else text


def parse_template(name, system, user):
    slot_names = tuple(_SLOT.findall(user))
    if len(set(slot_names)) != len(slot_names):
        raise TemplateError(f'Template "{name}" repeats a slot: {slot_names}')
    if _SLOT.search(system):
        raise TemplateError(f'Template "{name}" has slots in its system text')
    return PromptTemplate(name=name, system=system, user=user, slot_names=slot_names)


@lru_cache(maxsize=None)
def _load(name, prompts_dir):
    directory = Path(prompts_dir)
    user_path = directory / f'{name}.user.txt'
    if not user_path.exists():
        raise TemplateError(f'Template "{name}" not found in {directory}')
    system_path = directory / f'{name}.system.txt'
    system = _read(system_path) if system_path.exists() else ''
    return parse_template(name, system, _read(user_path))


def load_template(name, prompts_dir=None):
    prompts_dir = prompts_dir or arm_setting('PROMPTS_DIR', DEFAULT_PROMPTS_DIR)
    return _load(name, str(prompts_dir))


def render(template, bindings):
    """Substitute every slot in one pass; returns (system, user)."""
    for slot in template.slot_names:
        if slot not in bindings:
            raise MissingBindingError(slot)

    def substitute(match):
        return str(bindings[match.group(1)])

    user = _SLOT.sub(substitute, template.user)
    return template.system, user
