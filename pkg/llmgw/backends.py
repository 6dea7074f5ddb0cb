"""
Chat-completion backends.

Every backend exposes `complete(request) -> LlmResponse`:

- OpenAIChatBackend: live calls through the `openai` client; Claude models
  go to Anthropic's OpenAI-compatible endpoint.
- ScriptedBackend: deterministic answers from a rule file or a callable.
- CachedBackend: wraps another backend with the record/replay cache.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, replace

from django.conf import settings
from openai import (
    APIConnectionError, APITimeoutError, InternalServerError, OpenAI,
    OpenAIError, RateLimitError,
)
from tenacity import (
    RetryError, Retrying, retry_if_exception_type, stop_after_attempt,
    wait_exponential,
)

from arm_eval.conf import arm_setting

from .cache import ReplayCache
from .exceptions import CacheMissError, ExtractionError, GatewayError, TransportError
from .extract import Arity, extract_tagged

logger = logging.getLogger(__name__)

MODES = ('live', 'record', 'replay')

SELF_CONSISTENCY_TEMPERATURE = 0.7

_TRANSIENT = (APIConnectionError, APITimeoutError, InternalServerError, RateLimitError)


@dataclass(frozen=True)
class LlmRequest:
    model: str
    system: str
    user: str
    temperature: float = 0.0
    max_tokens: int = 2048
    # distinguishes self-consistency samples
    sample_index: int = 0
    # re-asks after an unparseable reply
    attempt: int = 0

    def as_dict(self):
        return asdict(self)

    @property
    def digest(self):
        payload = json.dumps(self.as_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()

    def messages(self):
        messages = []
        if self.system:
            messages.append({'role': 'system', 'content': self.system})
        messages.append({'role': 'user', 'content': self.user})
        return messages


@dataclass(frozen=True)
class LlmResponse:
    raw_text: str
    cached: bool
    backend_id: str


# ---------------------------------------------------------------------

class OpenAIChatBackend:
    """Live chat completions with tenacity retries on transient errors."""

    def __init__(self, api_key, base_url, retries=4, timeout=120):
        if not api_key:
            raise TransportError(f'No API key configured for {base_url}')
        self.client = OpenAI(api_key=api_key, base_url=base_url, timeout=timeout, max_retries=0)
        self.retries = retries
        self.backend_id = f'openai-compatible:{base_url}'

    def _create(self, request):
        response = self.client.chat.completions.create(
            model=request.model,
            messages=request.messages(),
            temperature=request.temperature,
            max_tokens=request.max_tokens,
        )
        content = response.choices[0].message.content
        return content or ''

    def complete(self, request):
        retrying = Retrying(
            reraise=False,
            stop=stop_after_attempt(self.retries),
            wait=wait_exponential(multiplier=0.5, min=0.5, max=8),
            retry=retry_if_exception_type(_TRANSIENT),
        )
        try:
            raw_text = retrying(self._create, request)
        except RetryError as exc:
            raise TransportError(
                f'{request.model}: no response after {self.retries} attempts'
            ) from exc.last_attempt.exception()
        except OpenAIError as exc:
            raise TransportError(f'{request.model}: {exc}') from exc
        return LlmResponse(raw_text=raw_text, cached=False, backend_id=self.backend_id)


class ScriptedBackend:
    """
    Answers from rules instead of a model.

    A rule file is `{"rules": [{"contains": [...], "response": "...",
    "sample_index": n}], "default": "..."}`. The first rule whose every
    `contains` string occurs in the prompt (system + user) wins;
    `sample_index`, when given, must match too. A `responder` callable may
    be passed instead of rules.
    """

    def __init__(self, rules=(), default=None, responder=None, backend_id='scripted'):
        self.rules = tuple(rules)
        self.default = default
        self.responder = responder
        self.backend_id = backend_id

    @classmethod
    def from_file(cls, path):
        with open(path, 'r', encoding='utf-8') as f:
            script = json.load(f)
        return cls(
            rules=script.get('rules', []),
            default=script.get('default'),
            backend_id=f'scripted:{script.get("name", path)}',
        )

    @classmethod
    def constant(cls, text):
        return cls(default=text, backend_id='scripted:constant')

    def _match(self, request):
        prompt = f'{request.system}\n{request.user}'
        for rule in self.rules:
            needles = rule.get('contains', [])
            if isinstance(needles, str):
                needles = [needles]
            if 'sample_index' in rule and rule['sample_index'] != request.sample_index:
                continue
            if all(needle in prompt for needle in needles):
                return rule['response']
        return self.default

    def complete(self, request):
        raw_text = self.responder(request) if self.responder else self._match(request)
        if raw_text is None:
            raise TransportError(f'No scripted response for request {request.digest[:12]}')
        return LlmResponse(raw_text=raw_text, cached=False, backend_id=self.backend_id)


class CachedBackend:
    """
    Record/replay wrapper.

    - record: replay hits, call the inner backend on misses and persist.
    - replay: never call out; a miss raises CacheMissError, unless `strict`
      is off, in which case the miss is recorded like in record mode.
    """

    def __init__(self, inner, cache, mode='replay', strict=True):
        if mode not in ('record', 'replay'):
            raise GatewayError(f'CachedBackend mode must be record or replay, got "{mode}"')
        self.inner = inner
        self.cache = cache
        self.mode = mode
        self.strict = strict
        self.backend_id = getattr(inner, 'backend_id', 'replay') if inner else 'replay'

    def complete(self, request):
        digest = request.digest
        entry = self.cache.get(digest)
        if entry is not None:
            return LlmResponse(raw_text=entry['raw_text'], cached=True, backend_id=entry['backend_id'])

        if self.mode == 'replay' and (self.strict or self.inner is None):
            logger.warning('Replay miss for %s (model %s)', digest[:12], request.model)
            raise CacheMissError(digest)

        response = self.inner.complete(request)
        self.cache.put(request, response.raw_text, response.backend_id)
        return response


# ---------------------------------------------------------------------

def complete(backend, request):
    """Send one request through a backend."""
    response = backend.complete(request)
    logger.debug(
        'model=%s sample=%s attempt=%s cached=%s', request.model,
        request.sample_index, request.attempt, response.cached,
    )
    return response


@dataclass(frozen=True)
class TaggedAnswer:
    values: list
    response: LlmResponse
    raw_responses: tuple


def ask_tagged(backend, request, tag, arity=Arity.EXACTLY_ONE, reasks=1, require_text=True, parse=None):
    """
    Complete and extract `<tag>` spans, re-asking once on a malformed reply.

    The re-ask bumps `attempt` so it gets its own cache entry. With
    `require_text`, an empty span counts as malformed. `parse`, when given,
    maps each span to a value and may raise ExtractionError itself.
    """
    raw_responses = []
    last_error = None
    for attempt in range(reasks + 1):
        response = complete(backend, replace(request, attempt=request.attempt + attempt))
        raw_responses.append(response.raw_text)
        try:
            values = extract_tagged(response.raw_text, tag, arity)
            if require_text and not all(values):
                raise ExtractionError(f'Empty <{tag}> span in response')
            if parse is not None:
                values = [parse(value) for value in values]
        except ExtractionError as exc:
            last_error = exc
            logger.warning('Unparseable <%s> reply from %s (attempt %d): %s', tag, request.model, attempt + 1, exc)
            continue
        return TaggedAnswer(values=values, response=response, raw_responses=tuple(raw_responses))
    raise ExtractionError(str(last_error), raw_responses=raw_responses)


# ---------------------------------------------------------------------

def live_backend_for(model):
    """Pick credentials by model family."""
    retries = arm_setting('TRANSPORT_RETRIES', 4)
    timeout = arm_setting('REQUEST_TIMEOUT', 120)
    if model.lower().startswith('claude'):
        return OpenAIChatBackend(settings.ANTHROPIC_API_KEY, settings.ANTHROPIC_BASE_URL, retries, timeout)
    return OpenAIChatBackend(settings.OPENAI_API_KEY, settings.OPENAI_BASE_URL, retries, timeout)


def build_backend(model, mode='live', cache_dir=None, script=None, strict=None):
    """
    Assemble the backend for a run.

    `script` swaps the live backend for a ScriptedBackend read from a file.
    Replay mode needs an existing cache; the live backend is only built
    when a call could actually go out.
    """
    if mode not in MODES:
        raise GatewayError(f'Unknown mode "{mode}". Use one of {", ".join(MODES)}')
    strict = arm_setting('REPLAY_STRICT', True) if strict is None else strict

    def inner():
        return ScriptedBackend.from_file(script) if script else live_backend_for(model)

    if mode == 'live':
        return inner()

    cache = ReplayCache(cache_dir or arm_setting('CACHE_DIR'))
    if mode == 'replay':
        if not cache.exists():
            raise GatewayError(f'Replay mode needs an existing cache at {cache.root}')
        return CachedBackend(None if strict else inner(), cache, mode='replay', strict=strict)
    return CachedBackend(inner(), cache, mode='record')
