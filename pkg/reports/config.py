"""Run configuration and its digest."""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field

from llmgw.backends import MODES
from llmgw.cache import ReplayCache

from .exceptions import ConfigError

# fields that never change what a run computes
_UNHASHED = ('output_dir', 'parallelism', 'xlsx')


def file_sha256(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(65536), b''):
            digest.update(block)
    return digest.hexdigest()


@dataclass(frozen=True)
class RunConfig:
    command: str
    output_dir: str
    corpus_path: str = ''
    corpus_format: str = 'native'
    model: str = ''
    mode: str = 'replay'
    method: str = ''
    seed: int = 0
    gold: str = 'subjectivity'
    parallelism: int = 1
    cache_dir: str = ''
    script: str = ''
    xlsx: bool = False
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.mode and self.mode not in MODES:
            raise ConfigError(f'Unknown mode "{self.mode}". Use one of {", ".join(MODES)}')
        if self.mode == 'replay' and not ReplayCache(self.cache_dir).exists():
            raise ConfigError(f'Replay mode needs an existing cache at {self.cache_dir}')
        if self.parallelism < 1:
            raise ConfigError('Parallelism must be at least 1')
        if self.script and not os.path.exists(self.script):
            raise ConfigError(f'Script file not found: {self.script}')
        return self

    def hashed_fields(self):
        values = {key: value for key, value in asdict(self).items() if key not in _UNHASHED}
        # a corpus is identified by its content, not where it sits
        if self.corpus_path and os.path.exists(self.corpus_path):
            values['corpus_path'] = os.path.basename(self.corpus_path)
            values['corpus_sha256'] = file_sha256(self.corpus_path)
        if self.script and os.path.exists(self.script):
            values['script'] = os.path.basename(self.script)
            values['script_sha256'] = file_sha256(self.script)
        if self.cache_dir:
            values['cache_dir'] = ''
        return values

    @property
    def digest(self):
        payload = json.dumps(self.hashed_fields(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()

    @property
    def run_id(self):
        parts = [self.command, self.method, self.model, str(self.seed), self.digest[:12]]
        return '-'.join(part for part in parts if part)
