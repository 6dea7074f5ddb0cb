"""
Two-sample bootstrap test for a difference in proportions.

Both groups are shifted to the pooled mean so resampling happens under the
null; the p-value is the share of resampled differences at least as large
in magnitude as the observed one, with +1 smoothing. Trials are drawn in
fixed-size chunks whose seeds come from one SeedSequence, so the result
does not depend on how many workers run them.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import MetricError

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 10000
CHUNK_TRIALS = 1000
_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BootstrapResult:
    observed_difference: float
    p_value: float
    trials: int
    seed: int
    two_sided: bool = True

    def as_dict(self):
        return {
            'observed_difference': self.observed_difference,
            'p_value': self.p_value,
            'trials': self.trials,
            'seed': self.seed,
            'two_sided': self.two_sided,
        }


def _chunk_exceedances(x_hat, y_hat, trials, seed_sequence, threshold):
    rng = np.random.default_rng(seed_sequence)
    x_idx = rng.integers(0, len(x_hat), size=(trials, len(x_hat)))
    y_idx = rng.integers(0, len(y_hat), size=(trials, len(y_hat)))
    differences = x_hat[x_idx].mean(axis=1) - y_hat[y_idx].mean(axis=1)
    return int(np.sum(np.abs(differences) >= threshold - _TOLERANCE))


def bootstrap_pvalue(group_a, group_b, trials=DEFAULT_TRIALS, seed=0, workers=1):
    x = np.asarray(list(group_a), dtype=float)
    y = np.asarray(list(group_b), dtype=float)
    if x.size == 0 or y.size == 0:
        raise MetricError('Bootstrap needs two non-empty groups')
    if trials < 1:
        raise MetricError('Bootstrap needs at least one trial')

    observed = float(x.mean() - y.mean())
    pooled = np.concatenate([x, y]).mean()
    x_hat = x - x.mean() + pooled
    y_hat = y - y.mean() + pooled

    sizes = [CHUNK_TRIALS] * (trials // CHUNK_TRIALS)
    if trials % CHUNK_TRIALS:
        sizes.append(trials % CHUNK_TRIALS)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    threshold = abs(observed)

    def run(chunk):
        size, seed_sequence = chunk
        return _chunk_exceedances(x_hat, y_hat, size, seed_sequence, threshold)

    chunks = list(zip(sizes, seeds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            exceedances = sum(pool.map(run, chunks))
    else:
        exceedances = sum(run(chunk) for chunk in chunks)

    p_value = (exceedances + 1) / (trials + 1)
    logger.debug('Bootstrap: diff=%.4f p=%.5f over %d trials', observed, p_value, trials)
    return BootstrapResult(observed_difference=observed, p_value=p_value, trials=trials, seed=seed)


def significance_marker(p_value):
    if p_value <= 0.001:
        return '**'
    if p_value <= 0.05:
        return '*'
    return ''
