from corpus.exceptions import ArmEvalError


class ConfigError(ArmEvalError):
    """The run configuration is unusable (bad flag value, missing cache, ...)."""
