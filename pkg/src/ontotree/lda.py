"""Relation-based latent Dirichlet allocation at one tree node.

The vocabulary unit is the relation triplet tuple; documents are reduced to
their topic-assignable triplet tokens present at the node. With symmetric
Dirichlet priors on the document-topic and topic-relation multinomials both
are integrated out, leaving a collapsed Gibbs sampler over the assignment
vector z. The conditional for token n with word w in document d is

    p(z_n = k | z_-n) ∝ (C[k, w] + eta) / (sum_w C[k, w] + W * eta)
                      * (B[d, k] + alpha)

with all counts excluding token n; the document-side denominator does not
depend on k and drops out under normalization. Vocabulary and document
indices are node-local, so smoothing mass scales with the subproblem.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import CorpusConfig
from .corpus import NounPhraseToken


@dataclass
class GibbsState:
    """Sampler state: counts, totals, and per-token assignments.

    C is topics x local vocabulary; B is local documents x topics.
    topic_totals and doc_totals cache the respective row sums.
    """

    node_id: str
    doc_ids: list[str]
    vocab_keys: list[tuple[str, str, str]]
    docs: np.ndarray
    words: np.ndarray
    z: np.ndarray
    C: np.ndarray
    B: np.ndarray
    topic_totals: np.ndarray
    doc_totals: np.ndarray

    @property
    def n_tokens(self) -> int:
        return len(self.z)

    @property
    def n_topics(self) -> int:
        return self.C.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.C.shape[1]

    def validate(self) -> None:
        """Check the count invariants exactly; raises ValueError on violation."""
        if (self.C < 0).any() or (self.B < 0).any():
            raise ValueError("negative counts in Gibbs state")
        expected_c = np.zeros_like(self.C)
        expected_b = np.zeros_like(self.B)
        for d, w, k in zip(self.docs, self.words, self.z):
            expected_c[k, w] += 1
            expected_b[d, k] += 1
        if not np.array_equal(expected_c, self.C) or not np.array_equal(expected_b, self.B):
            raise ValueError("count matrices inconsistent with assignments")
        if not np.array_equal(self.C.sum(axis=1), self.topic_totals):
            raise ValueError("topic totals inconsistent with C row sums")
        if not np.array_equal(self.B.sum(axis=1), self.doc_totals):
            raise ValueError("document totals inconsistent with B row sums")

    @classmethod
    def from_tokens(cls, tokens: Sequence[NounPhraseToken], assignments: Sequence[int],
                    n_topics: int, node_id: str = "") -> "GibbsState":
        """Build counts from tokens and an initial assignment vector."""
        if not tokens:
            raise ValueError("cannot build a Gibbs state for zero tokens")
        if n_topics < 1:
            raise ValueError("need at least one topic")
        if len(assignments) != len(tokens):
            raise ValueError("one assignment per token required")

        doc_index: dict[str, int] = {}
        word_index: dict[tuple[str, str, str], int] = {}
        docs = np.empty(len(tokens), dtype=np.int64)
        words = np.empty(len(tokens), dtype=np.int64)
        for i, tok in enumerate(tokens):
            docs[i] = doc_index.setdefault(tok.doc_id, len(doc_index))
            words[i] = word_index.setdefault(tok.word_key, len(word_index))

        z = np.asarray(assignments, dtype=np.int64).copy()
        if z.min() < 0 or z.max() >= n_topics:
            raise ValueError(f"assignments must lie in [0, {n_topics})")

        C = np.zeros((n_topics, len(word_index)), dtype=np.int64)
        B = np.zeros((len(doc_index), n_topics), dtype=np.int64)
        for d, w, k in zip(docs, words, z):
            C[k, w] += 1
            B[d, k] += 1
        return cls(node_id=node_id, doc_ids=list(doc_index), vocab_keys=list(word_index),
                   docs=docs, words=words, z=z, C=C, B=B,
                   topic_totals=C.sum(axis=1), doc_totals=B.sum(axis=1))


@dataclass(frozen=True)
class PosteriorEstimates:
    """Smoothed point estimates from final counts.

    theta_hat[d] is the topic distribution of local document d; beta_hat[k]
    is the relation distribution of topic k. Rows sum to one and are
    strictly positive.
    """

    theta_hat: np.ndarray
    beta_hat: np.ndarray
    doc_ids: list[str]
    vocab_keys: list[tuple[str, str, str]]


def gibbs_conditional(token_index: int, state: GibbsState,
                      alpha: float, eta: float) -> np.ndarray:
    """Normalized topic distribution for one token whose counts have already
    been removed from C and B (the exclude-self convention)."""
    w = state.words[token_index]
    d = state.docs[token_index]
    if state.C[:, w].min() < 0 or state.B[d].min() < 0 or state.topic_totals.min() < 0:
        raise ValueError("counts negative after decrement; token removed twice?")
    weights = ((state.C[:, w] + eta) / (state.topic_totals + state.vocab_size * eta)
               * (state.B[d] + alpha))
    return weights / weights.sum()


def gibbs_sweep(state: GibbsState, alpha: float, eta: float,
                rng: np.random.Generator) -> GibbsState:
    """Resample every token once, in index order, updating counts in place."""
    C, B = state.C, state.B
    topic_totals, doc_totals = state.topic_totals, state.doc_totals
    words, docs, z = state.words, state.docs, state.z
    vocab_eta = state.vocab_size * eta
    for n in range(len(z)):
        w = words[n]
        d = docs[n]
        old = z[n]
        C[old, w] -= 1
        topic_totals[old] -= 1
        B[d, old] -= 1
        doc_totals[d] -= 1

        weights = (C[:, w] + eta) / (topic_totals + vocab_eta) * (B[d] + alpha)
        cumulative = np.cumsum(weights)
        new = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
        if new >= len(weights):
            new = len(weights) - 1

        z[n] = new
        C[new, w] += 1
        topic_totals[new] += 1
        B[d, new] += 1
        doc_totals[d] += 1
    return state


def posterior_estimates(state: GibbsState, alpha: float, eta: float) -> PosteriorEstimates:
    theta_hat = (state.B + alpha) / (state.doc_totals[:, None] + state.n_topics * alpha)
    beta_hat = (state.C + eta) / (state.topic_totals[:, None] + state.vocab_size * eta)
    return PosteriorEstimates(theta_hat=theta_hat, beta_hat=beta_hat,
                              doc_ids=list(state.doc_ids),
                              vocab_keys=list(state.vocab_keys))


def train_node(tokens: Sequence[NounPhraseToken], n_topics: int, init,
               config: CorpusConfig, rng: np.random.Generator,
               node_id: str = "",
               sweep_callback: Callable[[GibbsState, int], None] | None = None,
               ) -> tuple[GibbsState, PosteriorEstimates]:
    """Fit one node: initialize counts from a partition, run the configured
    number of sweeps, and return the final state with smoothed estimates.

    `init` is either a partition state (its .assignments are used) or a
    plain assignment sequence. With zero iterations the estimates reflect
    the initialization exactly.
    """
    assignments = getattr(init, "assignments", init)
    state = GibbsState.from_tokens(tokens, assignments, n_topics, node_id=node_id)
    for sweep in range(config.gibbs_iterations):
        gibbs_sweep(state, config.alpha, config.eta, rng)
        if sweep_callback is not None:
            sweep_callback(state, sweep)
    return state, posterior_estimates(state, config.alpha, config.eta)
