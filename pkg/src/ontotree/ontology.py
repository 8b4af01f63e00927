"""Terminological ontology assembly and seed pruning.

The labeled topic tree becomes a subclass forest (child label, parent
label); corpus triplets whose subject is a class label are attached as
relation assertions. The subject-object graph over all triplets supports
breadth-first seed pruning to restrict a corpus to one semantic
neighborhood before building.
"""

from __future__ import annotations

import dataclasses
import json
import urllib.parse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import Corpus, Document, RelationTriplet
from .hierarchy import TopicTree

TripleKey = tuple[str, str, str]


@dataclass(frozen=True)
class Ontology:
    """Classes, subclass edges, and relation assertions.

    Assertion identity is the (subject, verb, object) tuple. provenance
    (label -> tree node id) and dropped_triplets (count of corpus triplets
    whose subject matched no class) are diagnostics excluded from equality.
    """

    classes: frozenset[str]
    subclass_edges: frozenset[tuple[str, str]]
    assertions: frozenset[TripleKey]
    provenance: dict[str, str] = field(default_factory=dict, compare=False)
    dropped_triplets: int = field(default=0, compare=False)

    def __post_init__(self):
        for subject, _verb, _obj in self.assertions:
            if subject not in self.classes:
                raise ValueError(f"assertion subject {subject!r} is not a class")
        for child, parent in self.subclass_edges:
            if child not in self.classes or parent not in self.classes:
                raise ValueError(f"subclass edge ({child!r}, {parent!r}) outside classes")


def link_relations(tree: TopicTree, corpus: Corpus) -> Ontology:
    """Attach corpus triplets to tree labels.

    Classes are all node labels; subclass edges mirror labeled tree edges;
    a triplet becomes an assertion of the class equal to its subject.
    Triplets whose subject matches no label are only counted.
    """
    classes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    provenance: dict[str, str] = {}
    for node in tree.nodes():
        if node.label is None:
            continue
        classes.add(node.label)
        provenance.setdefault(node.label, node.node_id)
        for child in node.children:
            if child.label is not None:
                edges.add((child.label, node.label))

    assertions: set[TripleKey] = set()
    dropped = 0
    for key in {t.key() for t in corpus.triplets()}:
        if key[0] in classes:
            assertions.add(key)
        else:
            dropped += 1
    return Ontology(classes=frozenset(classes), subclass_edges=frozenset(edges),
                    assertions=frozenset(assertions), provenance=provenance,
                    dropped_triplets=dropped)


@dataclass
class TripletGraph:
    """Simple undirected graph over phrases appearing as subjects or objects.

    Parallel triplets between the same pair share one edge; self-relations
    add the node but no edge.
    """

    nodes: set[str] = field(default_factory=set)
    adjacency: dict[str, set[str]] = field(default_factory=dict)
    edge_triplets: dict[frozenset[str], set[TripleKey]] = field(default_factory=dict)
    triplet_keys: set[TripleKey] = field(default_factory=set)

    def add(self, key: TripleKey) -> None:
        subject, _verb, obj = key
        self.triplet_keys.add(key)
        self.nodes.add(subject)
        if not obj:
            return
        self.nodes.add(obj)
        if obj == subject:
            return
        self.adjacency.setdefault(subject, set()).add(obj)
        self.adjacency.setdefault(obj, set()).add(subject)
        self.edge_triplets.setdefault(frozenset((subject, obj)), set()).add(key)

    @property
    def edges(self) -> set[frozenset[str]]:
        return set(self.edge_triplets)


def build_triplet_graph(triplets: Iterable[RelationTriplet | TripleKey]) -> TripletGraph:
    graph = TripletGraph()
    for t in triplets:
        graph.add(t.key() if isinstance(t, RelationTriplet) else tuple(t))
    return graph


def prune(graph: TripletGraph, seeds: Iterable[str],
          steps: int | None = None) -> tuple[set[str], set[TripleKey]]:
    """Breadth-first neighborhood of the seeds.

    Each step adds every phrase adjacent to the current frontier; steps=None
    expands to exhaustion (the seeds' connected components). Returns the
    reached phrases and the triplets whose subject and object both lie
    inside them.
    """
    seeds = {s for s in seeds}
    if not seeds:
        raise ValueError("at least one seed phrase is required")
    missing = sorted(s for s in seeds if s not in graph.nodes)
    if missing:
        raise ValueError(f"seed phrases not present in the corpus: {missing}")
    if steps is not None and steps < 0:
        raise ValueError("steps must be >= 0")

    reached = set(seeds)
    frontier = set(seeds)
    rounds = 0
    while frontier and (steps is None or rounds < steps):
        frontier = {neighbor
                    for phrase in frontier
                    for neighbor in graph.adjacency.get(phrase, ())} - reached
        reached |= frontier
        rounds += 1
    kept = {key for key in graph.triplet_keys
            if key[0] in reached and key[2] in reached}
    return reached, kept


def filter_corpus(corpus: Corpus, surviving: set[TripleKey]) -> Corpus:
    """Corpus restricted to tokens whose triplet survives pruning."""
    documents = []
    for doc in corpus.documents:
        chunks = []
        for chunk in doc.chunks:
            sentences = []
            for sentence in chunk:
                kept = tuple(t for t in sentence if t.word_key in surviving)
                if kept:
                    sentences.append(kept)
            if sentences:
                chunks.append(tuple(sentences))
        if chunks:
            documents.append(_reindex(doc.doc_id, chunks))
    return Corpus(documents)


def _reindex(doc_id: str, chunks: list[tuple[tuple, ...]]) -> Document:
    """Renumber token locations after dropped sentences/chunks close gaps."""
    rebuilt = []
    for ci, chunk in enumerate(chunks):
        sentences = []
        for si, sentence in enumerate(chunk):
            sentences.append(tuple(
                dataclasses.replace(t, chunk_index=ci, sentence_index=si)
                for t in sentence))
        rebuilt.append(tuple(sentences))
    return Document(doc_id=doc_id, chunks=tuple(rebuilt))


def filter_ontology(ontology: Ontology, phrases: set[str]) -> Ontology:
    """Post-hoc restriction to classes inside a phrase set (e.g. a pruning
    result): keeps subclass edges with both ends retained and assertions
    whose subject is retained."""
    classes = frozenset(ontology.classes & phrases)
    edges = frozenset((c, p) for c, p in ontology.subclass_edges
                      if c in classes and p in classes)
    assertions = frozenset(a for a in ontology.assertions if a[0] in classes)
    provenance = {label: node for label, node in ontology.provenance.items()
                  if label in classes}
    return Ontology(classes=classes, subclass_edges=edges, assertions=assertions,
                    provenance=provenance, dropped_triplets=ontology.dropped_triplets)


def export_ontology(ontology: Ontology, format: str = "json") -> bytes:
    """Deterministic serialization; json is the canonical machine format."""
    if format == "json":
        payload = {
            "classes": sorted(ontology.classes),
            "subclass_edges": [list(edge) for edge in sorted(ontology.subclass_edges)],
            "assertions": [list(a) for a in sorted(ontology.assertions)],
        }
        return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    if format == "turtle":
        enc = lambda label: urllib.parse.quote(label, safe="")
        lines = [f"<{enc(child)}> subClassOf <{enc(parent)}> ."
                 for child, parent in sorted(ontology.subclass_edges)]
        lines += [f"<{enc(s)}> <{enc(v)}> <{enc(o)}> ."
                  for s, v, o in sorted(ontology.assertions)]
        return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")
    raise ValueError(f"unknown export format {format!r}")


def load_ontology(path: str | Path) -> Ontology:
    """Inverse of the json export (diagnostic fields reset)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    for key in ("classes", "subclass_edges", "assertions"):
        if key not in data or not isinstance(data[key], list):
            raise ValueError(f"{path}: missing ontology field {key!r}")
    return Ontology(
        classes=frozenset(data["classes"]),
        subclass_edges=frozenset((c, p) for c, p in data["subclass_edges"]),
        assertions=frozenset((s, v, o) for s, v, o in data["assertions"]),
    )
