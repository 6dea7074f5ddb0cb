from corpus.exceptions import ArmEvalError


class GatewayError(ArmEvalError):
    """Base class for model gateway failures."""


class MissingBindingError(GatewayError):
    def __init__(self, slot):
        self.slot = slot
        super().__init__(f'No binding for template slot "{slot}"')


class TemplateError(GatewayError):
    """A prompt template file is missing or malformed."""


class TransportError(GatewayError):
    """The backend could not be reached after all retries."""


class CacheMissError(GatewayError):
    def __init__(self, digest):
        self.digest = digest
        super().__init__(f'Replay cache has no response for request {digest}')


class ExtractionError(GatewayError):
    """The response did not contain the expected tagged span(s)."""

    def __init__(self, message, raw_responses=()):
        self.raw_responses = tuple(raw_responses)
        super().__init__(message)
