"""Acquaintance Chinese restaurant process (ACRP).

A CRP variant over located noun-phrase tokens: instead of favoring the
largest table only, a candidate favors topics holding synonyms or acronyms
of its phrase, is discouraged from topics that share none of its documents,
and otherwise scores topics by size discounted by chunk distance and damped
by sentence distance. Sequential sampling over a token stream yields a
partition whose cluster count seeds the per-node topic model.

Scores for a candidate against k existing topics plus one new topic:

* new topic: ``gamma / (n + gamma)`` for n previously assigned tokens;
* topic holding a synonym/acronym of the candidate: ``1 - gamma``;
* topic sharing no document with the candidate: ``gamma``;
* otherwise ``(C - (1 - 1/min_q)) / ((1 + min_s) * n + gamma)`` where C is
  the topic size and min_q / min_s are the smallest absolute chunk and
  sentence index differences to members from the candidate's document
  (min_q clamped to >= 1: same-chunk is maximal closeness).

All k+1 scores are normalized jointly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import CorpusConfig
from .corpus import NounPhraseToken, SynonymLexicon, _initials


class StateError(ValueError):
    """Partition state inconsistent with the claimed assignment count."""


@dataclass
class _Topic:
    """Membership caches for one topic (one restaurant table)."""

    members: list[int] = field(default_factory=list)
    contents: set[str] = field(default_factory=set)
    initials: set[str] = field(default_factory=set)
    doc_ids: set[str] = field(default_factory=set)
    locations: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    def add(self, index: int, token: NounPhraseToken) -> None:
        self.members.append(index)
        self.contents.add(token.content)
        initials = _initials(token.content)
        if initials:
            self.initials.add(initials)
        self.doc_ids.add(token.doc_id)
        self.locations.setdefault(token.doc_id, []).append(
            (token.chunk_index, token.sentence_index))

    def holds_synonym_of(self, token: NounPhraseToken,
                         lexicon: SynonymLexicon | None) -> bool:
        """Equivalent to checking is_synonym_or_acronym against every member,
        via cached content/initial sets."""
        content = token.content
        if content in self.contents:
            return True
        if content in self.initials:  # some member abbreviates to the candidate
            return True
        initials = _initials(content)
        if initials and initials in self.contents:
            return True
        if lexicon is not None and not lexicon.partners(content).isdisjoint(self.contents):
            return True
        return False

    @property
    def size(self) -> int:
        return len(self.members)


class PartitionState:
    """Sequential-assignment state: token -> topic, with per-topic caches."""

    def __init__(self, tokens: Sequence[NounPhraseToken]):
        self.tokens = list(tokens)
        self.assignments: list[int | None] = [None] * len(self.tokens)
        self.topics: list[_Topic] = []

    @property
    def assigned_count(self) -> int:
        return sum(t.size for t in self.topics)

    @property
    def topic_count(self) -> int:
        return len(self.topics)

    def assign(self, index: int, topic_index: int) -> None:
        """Seat token `index`; `topic_index == len(topics)` opens a new topic."""
        if self.assignments[index] is not None:
            raise StateError(f"token {index} already assigned")
        if topic_index == len(self.topics):
            self.topics.append(_Topic())
        elif not 0 <= topic_index < len(self.topics):
            raise StateError(f"topic index {topic_index} out of range")
        self.topics[topic_index].add(index, self.tokens[index])
        self.assignments[index] = topic_index

    def member_lists(self) -> list[list[int]]:
        return [list(t.members) for t in self.topics]

    @classmethod
    def from_assignments(cls, tokens: Sequence[NounPhraseToken],
                         assignments: Sequence[int]) -> "PartitionState":
        """Rebuild a state from a full assignment vector. Topic indices are
        relabeled densely in first-seen order; the partition is unchanged."""
        state = cls(tokens)
        relabel: dict[int, int] = {}
        for index, topic_index in enumerate(assignments):
            dense = relabel.setdefault(topic_index, len(relabel))
            state.assign(index, dense)
        return state


@dataclass(frozen=True)
class PartitionScores:
    """Raw and normalized scores over k existing topics plus a new one (last)."""

    raw: np.ndarray
    normalized: np.ndarray


def partition_scores(candidate: NounPhraseToken, state: PartitionState, n: int,
                     gamma: float, lexicon: SynonymLexicon | None = None) -> PartitionScores:
    """Score the candidate against every existing topic and a new topic."""
    if n != state.assigned_count:
        raise StateError(
            f"claimed n={n} but state holds {state.assigned_count} assigned tokens")
    k = state.topic_count
    raw = np.empty(k + 1, dtype=float)
    for i, topic in enumerate(state.topics):
        if topic.holds_synonym_of(candidate, lexicon):
            raw[i] = 1.0 - gamma
        elif candidate.doc_id not in topic.doc_ids:
            raw[i] = gamma
        else:
            locs = topic.locations[candidate.doc_id]
            min_q = min(abs(candidate.chunk_index - c) for c, _ in locs)
            min_s = min(abs(candidate.sentence_index - s) for _, s in locs)
            min_q = max(1, min_q)
            numerator = max(0.0, topic.size - (1.0 - 1.0 / min_q))
            raw[i] = numerator / ((1.0 + min_s) * n + gamma)
    raw[k] = gamma / (n + gamma)
    return PartitionScores(raw=raw, normalized=raw / raw.sum())


def sample_assignment(scores: PartitionScores, rng: np.random.Generator) -> int:
    """Draw a topic index from the normalized scores; index k means new topic."""
    cumulative = np.cumsum(scores.normalized)
    draw = int(np.searchsorted(cumulative, rng.random(), side="right"))
    return min(draw, len(scores.normalized) - 1)


def partition_pass(tokens: Sequence[NounPhraseToken], gamma: float,
                   rng: np.random.Generator,
                   lexicon: SynonymLexicon | None = None) -> PartitionState:
    """Seat every token once, in the given order."""
    state = PartitionState(tokens)
    for index, token in enumerate(state.tokens):
        scores = partition_scores(token, state, index, gamma, lexicon)
        state.assign(index, sample_assignment(scores, rng))
    return state


def estimate_topic_count(tokens: Sequence[NounPhraseToken], config: CorpusConfig,
                         rng: np.random.Generator,
                         lexicon: SynonymLexicon | None = None,
                         ) -> tuple[int, PartitionState]:
    """Iterate partition passes, shuffling document order between passes,
    until the topic count repeats on two consecutive passes (or the pass cap
    is reached). Returns the last pass's count and state, with assignments
    indexed in the original token order.

    Token order inside a document is reading order and is never shuffled.
    """
    tokens = list(tokens)
    if not tokens:
        raise ValueError("cannot estimate a topic count for an empty token set")

    by_doc: dict[str, list[int]] = {}
    for index, token in enumerate(tokens):
        by_doc.setdefault(token.doc_id, []).append(index)
    doc_ids = list(by_doc)

    def run_pass(order: list[str]) -> tuple[int, PartitionState]:
        permutation = [i for doc in order for i in by_doc[doc]]
        state = partition_pass([tokens[i] for i in permutation], config.gamma, rng, lexicon)
        by_token = [0] * len(tokens)
        for pos, token_index in enumerate(permutation):
            by_token[token_index] = state.assignments[pos]
        # Re-keyed to original token order; the partition is unchanged.
        return state.topic_count, PartitionState.from_assignments(tokens, by_token)

    previous_k, state = run_pass(doc_ids)
    for _ in range(config.acrp_max_passes - 1):
        order = [doc_ids[i] for i in rng.permutation(len(doc_ids))]
        k, state = run_pass(order)
        if k == previous_k:
            break
        previous_k = k
    return state.topic_count, state
