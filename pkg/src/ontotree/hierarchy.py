"""Divisive topic-tree construction.

Starting from a root holding every token, each expandable node estimates its
topic count from the closeness-aware partition process, fits the collapsed
sampler, and creates one child per non-empty topic. Each child is labeled
with its top phrase (highest aggregated topic-relation mass); the label's
tokens are consumed and the rest are routed into the child for recursive
expansion. Tokens therefore settle exactly once, either as a node's label
occurrences or as members of a terminal leaf, and every document may route
tokens down several sibling branches.

Child expansions draw their generators from (run seed, node path), so the
result is independent of scheduling and thread count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .config import CorpusConfig, derive_seed
from .corpus import Corpus, NounPhraseToken, SynonymLexicon
from .crp import estimate_topic_count
from .lda import GibbsState, PosteriorEstimates, train_node


@dataclass
class TopicNode:
    """One tree node: a labeled topic (label is None only at the root)."""

    node_id: str
    label: str | None
    level: int
    children: list["TopicNode"] = field(default_factory=list)
    members: list[NounPhraseToken] = field(default_factory=list)
    beta_top: list[tuple[str, float]] = field(default_factory=list)
    fitted: tuple[GibbsState, PosteriorEstimates] | None = None

    def walk(self) -> Iterator["TopicNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class TopicTree:
    root: TopicNode
    leaves: dict[str, list[str]]
    depth: int

    def nodes(self) -> Iterator[TopicNode]:
        return self.root.walk()

    def node_by_id(self, node_id: str) -> TopicNode:
        node = self.root
        if node_id:
            for part in node_id.split("."):
                node = node.children[int(part)]
        return node


def rank_topic_phrases(tokens: list[NounPhraseToken], state: GibbsState,
                       estimates: PosteriorEstimates, topic: int,
                       ) -> list[tuple[str, float, int]]:
    """Rank a topic's subject phrases by aggregated relation mass.

    A phrase's mass is the sum of beta_hat over the distinct vocabulary
    entries its tokens carry in this topic; ties break on token count, then
    lexicographically. `tokens` must be the node token list the state was
    fitted on.
    """
    word_sets: dict[str, set[int]] = {}
    counts: dict[str, int] = {}
    for pos, tok in enumerate(tokens):
        if state.z[pos] != topic:
            continue
        word_sets.setdefault(tok.content, set()).add(int(state.words[pos]))
        counts[tok.content] = counts.get(tok.content, 0) + 1
    ranked = [
        (phrase, float(sum(estimates.beta_hat[topic, w] for w in sorted(words))),
         counts[phrase])
        for phrase, words in word_sets.items()
    ]
    ranked.sort(key=lambda item: (-item[1], -item[2], item[0]))
    return ranked


def select_topic_label(ranking: list[tuple[str, float, int]],
                       exclude: frozenset[str] | set[str] = frozenset()) -> str | None:
    """Highest-ranked phrase not already used on this path (or by a sibling)."""
    for phrase, _mass, _count in ranking:
        if phrase not in exclude:
            return phrase
    return None


def _child_id(parent_id: str, position: int) -> str:
    return f"{parent_id}.{position}" if parent_id else str(position)


@dataclass
class _Expansion:
    """Result of expanding one node, applied by the single-writer main loop."""

    node: TopicNode
    queue: list[tuple[TopicNode, list[int], frozenset[str]]]
    terminal: list[tuple[int, str]]


def _expand(node: TopicNode, idxs: list[int], ancestors: frozenset[str],
            tokens: list[NounPhraseToken], config: CorpusConfig,
            lexicon: SynonymLexicon | None, root_sweep_callback) -> _Expansion:
    queue: list[tuple[TopicNode, list[int], frozenset[str]]] = []
    terminal: list[tuple[int, str]] = []
    if not idxs:
        return _Expansion(node, queue, terminal)

    if config.max_depth is not None and node.level >= config.max_depth:
        terminal.extend((i, node.node_id) for i in idxs)
        return _Expansion(node, queue, terminal)

    toks = [tokens[i] for i in idxs]
    contents = {t.content for t in toks}
    if len(contents) == 1:
        phrase = next(iter(contents))
        child = TopicNode(_child_id(node.node_id, 0), phrase, node.level + 1,
                          members=toks, beta_top=[(phrase, 1.0)])
        node.children.append(child)
        terminal.extend((i, child.node_id) for i in idxs)
        return _Expansion(node, queue, terminal)

    rng = np.random.default_rng(derive_seed(config.rng_seed, "node", node.node_id or "<root>"))
    n_topics, init = estimate_topic_count(toks, config, rng, lexicon)
    callback = root_sweep_callback if node.node_id == "" else None
    state, estimates = train_node(toks, n_topics, init, config, rng,
                                  node_id=node.node_id, sweep_callback=callback)
    node.fitted = (state, estimates)

    groups: dict[int, list[int]] = {}
    for pos, k in enumerate(state.z):
        groups.setdefault(int(k), []).append(pos)

    taken = set(ancestors)
    by_label: dict[str, tuple[TopicNode, list[int]]] = {}
    created: list[tuple[TopicNode, list[int], list[tuple[str, float, int]]]] = []
    for k in sorted(groups):
        positions = groups[k]
        ranking = rank_topic_phrases(toks, state, estimates, k)
        label = select_topic_label(ranking, exclude=taken)
        if label is None:
            # Every phrase here already labels an earlier sibling; fold the
            # group into the sibling owning its top phrase.
            owner = by_label.get(ranking[0][0])
            if owner is None:
                terminal.extend((idxs[p], node.node_id) for p in positions)
                continue
            child, residual = owner
            child.members.extend(toks[p] for p in positions)
            for p in positions:
                if toks[p].content == child.label:
                    terminal.append((idxs[p], child.node_id))
                else:
                    residual.append(idxs[p])
            continue
        taken.add(label)
        child = TopicNode(_child_id(node.node_id, len(node.children)), label,
                          node.level + 1, members=list(toks[p] for p in positions),
                          beta_top=[(p, m) for p, m, _ in ranking[:5]])
        node.children.append(child)
        residual = []
        for p in positions:
            if toks[p].content == label:
                terminal.append((idxs[p], child.node_id))
            else:
                residual.append(idxs[p])
        by_label[label] = (child, residual)
        created.append((child, residual, ranking))

    for child, residual, _ranking in created:
        if not residual:
            continue
        if len(created) == 1 and len(residual) == len(idxs):
            # Defensive: a lone child that consumed nothing would recurse
            # forever; terminate it as a leaf instead.
            terminal.extend((i, child.node_id) for i in residual)
            continue
        queue.append((child, residual, ancestors | {child.label}))
    return _Expansion(node, queue, terminal)


def build_tree(corpus: Corpus, config: CorpusConfig,
               lexicon: SynonymLexicon | None = None, threads: int = 1,
               root_sweep_callback=None) -> TopicTree:
    """Build the full topic tree for a corpus.

    `root_sweep_callback(state, sweep_index)`, when given, observes every
    sampler sweep of the root fit (used for perplexity traces).
    """
    tokens = list(corpus.tokens())
    if not tokens:
        raise ValueError("cannot build a tree for an empty corpus")

    root = TopicNode(node_id="", label=None, level=0, members=list(tokens))
    terminal: list[str | None] = [None] * len(tokens)
    frontier: list[tuple[TopicNode, list[int], frozenset[str]]] = [
        (root, list(range(len(tokens))), frozenset())]

    def run(item):
        node, idxs, ancestors = item
        return _expand(node, idxs, ancestors, tokens, config, lexicon,
                       root_sweep_callback)

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            if pool is not None:
                expansions = list(pool.map(run, frontier))
            else:
                expansions = [run(item) for item in frontier]
            frontier = []
            for expansion in expansions:
                for token_index, node_id in expansion.terminal:
                    terminal[token_index] = node_id
                frontier.extend(expansion.queue)
    finally:
        if pool is not None:
            pool.shutdown()

    unplaced = [i for i, spot in enumerate(terminal) if spot is None]
    if unplaced:
        raise RuntimeError(f"{len(unplaced)} tokens were never placed; tree build bug")

    leaves: dict[str, set[str]] = {}
    for token, node_id in zip(tokens, terminal):
        leaves.setdefault(token.doc_id, set()).add(node_id)
    depth = max(node.level for node in root.walk())
    return TopicTree(root=root,
                     leaves={d: sorted(ids) for d, ids in sorted(leaves.items())},
                     depth=depth)


def topic_paths(tree: TopicTree, doc_id: str) -> list[tuple[str, ...]]:
    """All distinct root-to-node label paths holding tokens of the document."""
    if doc_id not in tree.leaves:
        raise KeyError(f"unknown document {doc_id!r}")
    paths = set()
    for node_id in tree.leaves[doc_id]:
        labels = []
        node = tree.root
        if node_id:
            for part in node_id.split("."):
                node = node.children[int(part)]
                labels.append(node.label)
        paths.add(tuple(labels))
    return sorted(paths)


def _node_dict(node: TopicNode) -> dict:
    return {
        "node_id": node.node_id,
        "label": node.label,
        "level": node.level,
        "members": sorted(t.content for t in node.members),
        "beta_top": [[phrase, round(float(mass), 12)] for phrase, mass in node.beta_top],
        "children": [_node_dict(c) for c in node.children],
    }


def serialize_tree(tree: TopicTree) -> str:
    """Canonical JSON: sorted keys, stable child order, deterministic bytes."""
    payload = {
        "depth": tree.depth,
        "leaves": tree.leaves,
        "root": _node_dict(tree.root),
    }
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
