from corpus.exceptions import ArmEvalError


class MissingVariantError(ArmEvalError):
    """A claim position has no variant of a needed polarity."""

    def __init__(self, summary_id, position, polarity):
        self.summary_id = summary_id
        self.position = position
        self.polarity = polarity
        super().__init__(f'No {polarity} variant for {summary_id} position {position}')
