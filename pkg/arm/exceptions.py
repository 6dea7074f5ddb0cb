from corpus.exceptions import ArmEvalError


class PreconditionError(ArmEvalError):
    """The inputs to a per-claim step do not fit together."""


class ParseFailedError(ArmEvalError):
    """The model reply stayed unparseable after the re-ask."""

    def __init__(self, message, raw_responses=()):
        self.raw_responses = tuple(raw_responses)
        super().__init__(message)
