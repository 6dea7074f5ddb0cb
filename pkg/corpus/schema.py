"""
Immutable data model for stories, summaries and claims.

A loaded Corpus is never mutated, so it can be shared read-only across the
worker threads that issue model calls.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property


SCHEMA_VERSION = '1'


class FaithStatus(str, Enum):
    SUPPORTED = 'supported'
    UNSUPPORTED = 'unsupported'
    AMBIGUOUS = 'ambiguous'
    NOT_APPLICABLE = 'not_applicable'


class Subjectivity(str, Enum):
    OBJECTIVE = 'objective'
    SUBJECTIVE = 'subjective'


# StorySumm source labels -> faithfulness statuses
SOURCE_LABELS = {
    'faithful': FaithStatus.SUPPORTED,
    'unfaithful': FaithStatus.UNSUPPORTED,
    'n/a': FaithStatus.NOT_APPLICABLE,
    'na': FaithStatus.NOT_APPLICABLE,
    'supported': FaithStatus.SUPPORTED,
    'unsupported': FaithStatus.UNSUPPORTED,
    'ambiguous': FaithStatus.AMBIGUOUS,
    'not_applicable': FaithStatus.NOT_APPLICABLE,
}

AMBIGUITY_TYPES = (1, 2, 3, 4, 5)

# Type 5 (the story itself is too confusing) is kept in the data but left
# out of every per-type analysis.
ANALYZED_AMBIGUITY_TYPES = (1, 2, 3, 4)

WRITER_KINDS = ('llm', 'human')


def parse_faith_status(value):
    """Map a raw label onto a FaithStatus, or return None if unknown."""
    if isinstance(value, FaithStatus):
        return value
    return SOURCE_LABELS.get(str(value).strip().lower())


@dataclass(frozen=True)
class FaithLabel:
    annotator_id: str
    value: FaithStatus


@dataclass(frozen=True)
class Claim:
    id: str
    text: str
    faithfulness_labels: tuple = ()
    subjectivity: Subjectivity | None = None
    ambiguity_type: int | None = None
    # adjudicated label when the source ships one
    gold_faithfulness: FaithStatus | None = None

    @property
    def gold_faith(self):
        """Adjudicated label if present, else the annotator majority (ties -> ambiguous)."""
        if self.gold_faithfulness is not None:
            return self.gold_faithfulness
        if not self.faithfulness_labels:
            return None
        ranked = Counter(label.value for label in self.faithfulness_labels).most_common()
        if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
            return FaithStatus.AMBIGUOUS
        return ranked[0][0]

    @property
    def in_scope(self):
        """N/A commentary claims are kept out of detection scoring."""
        return self.gold_faith != FaithStatus.NOT_APPLICABLE

    @property
    def is_subjective(self):
        return self.subjectivity == Subjectivity.SUBJECTIVE


@dataclass(frozen=True)
class Story:
    id: str
    title: str
    text: str


@dataclass(frozen=True)
class SummaryRecord:
    id: str
    story_id: str
    writer: str
    claims: tuple
    writer_kind: str = 'llm'

    @property
    def text(self):
        return ' '.join(claim.text for claim in self.claims)


@dataclass(frozen=True)
class Provenance:
    source_path: str
    schema_version: str = SCHEMA_VERSION
    adapter: str = 'native'


@dataclass(frozen=True)
class ClaimContext:
    """A claim together with the story and summary it belongs to."""

    story: Story
    summary: SummaryRecord
    claim: Claim
    position: int


@dataclass(frozen=True)
class Corpus:
    stories: tuple
    summaries: tuple
    provenance: Provenance = field(default=Provenance(source_path=''), compare=False)

    @cached_property
    def _stories_by_id(self):
        return {story.id: story for story in self.stories}

    @cached_property
    def _contexts_by_claim(self):
        index = {}
        for context in self.contexts():
            index[context.claim.id] = context
        return index

    def story(self, story_id):
        return self._stories_by_id[story_id]

    def context(self, claim_id):
        return self._contexts_by_claim[claim_id]

    def contexts(self):
        """Yield every claim with its story and summary, in file order."""
        for summary in self.summaries:
            story = self._stories_by_id[summary.story_id]
            for position, claim in enumerate(summary.claims):
                yield ClaimContext(story=story, summary=summary, claim=claim, position=position)

    @property
    def claims(self):
        return [claim for summary in self.summaries for claim in summary.claims]

    @property
    def claim_count(self):
        return sum(len(summary.claims) for summary in self.summaries)

    def in_scope_contexts(self):
        return [context for context in self.contexts() if context.claim.in_scope]

    def select(self, writer_kind=None):
        """Return a slice of the corpus restricted to one writer kind."""
        summaries = tuple(
            summary for summary in self.summaries
            if writer_kind is None or summary.writer_kind == writer_kind
        )
        story_ids = {summary.story_id for summary in summaries}
        stories = tuple(story for story in self.stories if story.id in story_ids)
        return Corpus(stories=stories, summaries=summaries, provenance=self.provenance)
