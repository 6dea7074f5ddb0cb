"""Per-run call options and the bounded worker pool used for per-claim calls."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from arm_eval.conf import arm_setting


@dataclass(frozen=True)
class RunOptions:
    model: str
    temperature: float = 0.0
    max_tokens: int = 2048
    parallelism: int = 1
    prompts_dir: str | None = None
    explanation_source: str = 'response'
    equality_mode: str = 'normalized'

    @classmethod
    def from_settings(cls, model, **overrides):
        values = {
            'model': model,
            'temperature': arm_setting('TEMPERATURE', 0.0),
            'max_tokens': arm_setting('MAX_TOKENS', 2048),
            'parallelism': arm_setting('PARALLELISM', 1),
            'prompts_dir': arm_setting('PROMPTS_DIR'),
            'explanation_source': arm_setting('EXPLANATION_SOURCE', 'response'),
            'equality_mode': arm_setting('EQUALITY_MODE', 'normalized'),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


def run_bounded(fn, items, parallelism=1):
    """Apply `fn` to every item with at most `parallelism` threads; keeps input order."""
    items = list(items)
    if parallelism <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(fn, items))
