"""Errors shared by every app in the pipeline."""


class ArmEvalError(Exception):
    """Base class for every error raised by the pipeline."""


class CorpusError(ArmEvalError):
    """The corpus file violates the schema. `record_id` names the offender."""

    def __init__(self, message, record_id=None):
        self.record_id = record_id
        if record_id is not None:
            message = f'{message} (record: {record_id})'
        super().__init__(message)


class DanglingReferenceError(CorpusError):
    """A summary points at a story id that does not exist."""


class MissingLayerError(ArmEvalError):
    """A requested label layer is absent on some claims."""

    def __init__(self, layer, claim_ids):
        self.layer = layer
        self.claim_ids = tuple(claim_ids)
        preview = ', '.join(self.claim_ids[:10])
        more = f' (+{len(self.claim_ids) - 10} more)' if len(self.claim_ids) > 10 else ''
        super().__init__(f'Layer "{layer}" missing on claims: {preview}{more}')
