from corpus.exceptions import ArmEvalError


class MetricError(ArmEvalError):
    """A metric is undefined for the given inputs."""
