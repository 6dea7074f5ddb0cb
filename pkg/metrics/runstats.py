"""Summary numbers for a run of rewrite results."""

import numpy as np


def summary_stats(results):
    """
    Rewrite count, mean normalized edit distance over rewritten claims, and
    mean explanation size over rewritten claims whose explanation parsed.
    """
    results = list(results)
    rewritten = [result for result in results if result.rewritten]
    explained = [result for result in rewritten if not result.explanation_failed]

    mean_distance = float(np.mean([r.normalized_edit_distance for r in rewritten])) if rewritten else 0.0
    mean_size = float(np.mean([r.explanation_size for r in explained])) if explained else 0.0
    return {
        'claims': len(results),
        'rewrite_count': len(rewritten),
        'mean_normalized_edit_distance': mean_distance,
        'mean_explanation_size': mean_size,
        'explanation_failures': sum(1 for r in rewritten if r.explanation_failed),
    }
