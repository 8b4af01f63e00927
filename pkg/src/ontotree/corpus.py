"""Corpus data model: documents of located noun-phrase tokens carrying
relation triplets, plus phrase normalization and synonym/acronym matching.

The ingestion format is JSONL, one document per line:

    {"doc_id": str,
     "chunks": [[[{"raw": str,
                   "triplets": [{"subject": str, "verb": str, "object": str}]},
                  ...],   # sentence: list of tokens
                 ...],    # chunk: list of sentences
                ...]}     # document: list of chunks

Chunk granularity (section, paragraph, slide) is the producer's choice;
only the nesting indices matter here. A token record listing several
triplets is expanded into one model token per triplet, so token counts
track triplet occurrences rather than distinct surface phrases.
"""

from __future__ import annotations

import io
import json
import re
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

TRIPLET_SOURCES = ("ingested", "structural", "pattern", "passive-inverse")

_WS_RE = re.compile(r"\s+")
_STRIP_CHARS = string.punctuation + string.whitespace


class CorpusFormatError(ValueError):
    """Raised when an input file violates the corpus, lexicon, or gold schema."""


def normalize_phrase(raw: str) -> str:
    """Lowercase, collapse whitespace, strip edge punctuation. Idempotent."""
    collapsed = _WS_RE.sub(" ", raw.lower())
    return collapsed.strip(_STRIP_CHARS)


def _initials(phrase: str) -> str | None:
    """Initial letters of a multi-word phrase ("integrated circuit" -> "ic")."""
    words = phrase.split()
    if len(words) < 2:
        return None
    return "".join(w[0] for w in words)


class SynonymLexicon:
    """Symmetric closure of user-supplied synonym pairs (normalized phrases)."""

    def __init__(self, pairs: Iterable[tuple[str, str]] = ()):
        self._partners: dict[str, set[str]] = {}
        for a, b in pairs:
            a, b = normalize_phrase(a), normalize_phrase(b)
            if not a or not b:
                continue
            self._partners.setdefault(a, set()).add(b)
            self._partners.setdefault(b, set()).add(a)

    def are_synonyms(self, a: str, b: str) -> bool:
        return b in self._partners.get(a, ())

    def partners(self, phrase: str) -> frozenset[str]:
        return frozenset(self._partners.get(phrase, ()))

    def __len__(self) -> int:
        return sum(len(v) for v in self._partners.values()) // 2


def load_synonym_lexicon(path: str | Path) -> SynonymLexicon:
    """Load a JSON array of two-string pairs."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise CorpusFormatError(f"{path}: synonym lexicon must be a JSON array of pairs")
    pairs = []
    for i, entry in enumerate(data):
        if not (isinstance(entry, list) and len(entry) == 2
                and all(isinstance(x, str) for x in entry)):
            raise CorpusFormatError(f"{path}: entry {i}: expected a pair of strings")
        pairs.append((entry[0], entry[1]))
    return SynonymLexicon(pairs)


def is_synonym_or_acronym(a: str, b: str, lexicon: SynonymLexicon | None = None) -> bool:
    """True iff the normalized phrases are equal, listed as synonyms, or one
    is the initial-letter acronym of the other (>= 2 words). Symmetric."""
    if a == b:
        return True
    if lexicon is not None and lexicon.are_synonyms(a, b):
        return True
    return _initials(a) == b or _initials(b) == a


@dataclass(frozen=True)
class RelationTriplet:
    """One (subject, verb, object) relation occurrence.

    Vocabulary identity is the normalized (subject, verb, object) tuple;
    source and doc_id are provenance.
    """

    subject: str
    verb: str
    object: str
    source: str = "ingested"
    doc_id: str = ""

    def __post_init__(self):
        if not self.subject:
            raise ValueError("triplet subject must be non-empty")
        if not self.verb:
            raise ValueError("triplet verb must be non-empty")
        if self.source not in TRIPLET_SOURCES:
            raise ValueError(f"unknown triplet source {self.source!r}")

    def key(self) -> tuple[str, str, str]:
        return (self.subject, self.verb, self.object)


@dataclass(frozen=True)
class NounPhraseToken:
    """One located noun-phrase occurrence with its relation triplets."""

    content: str
    raw: str
    doc_id: str
    chunk_index: int
    sentence_index: int
    triplets: tuple[RelationTriplet, ...]

    def __post_init__(self):
        if not self.content:
            raise ValueError("token content must be non-empty")
        if self.chunk_index < 0 or self.sentence_index < 0:
            raise ValueError("token locations must be non-negative")
        if not self.triplets:
            raise ValueError("token must carry at least one triplet")

    @property
    def word_key(self) -> tuple[str, str, str]:
        """The vocabulary unit this token contributes to topic counts."""
        return self.triplets[0].key()


@dataclass(frozen=True)
class Document:
    """Ordered chunks of ordered sentences of tokens; locations match nesting."""

    doc_id: str
    chunks: tuple[tuple[tuple[NounPhraseToken, ...], ...], ...]

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        for ci, chunk in enumerate(self.chunks):
            for si, sentence in enumerate(chunk):
                for tok in sentence:
                    if tok.doc_id != self.doc_id:
                        raise ValueError(
                            f"token doc_id {tok.doc_id!r} inconsistent with document {self.doc_id!r}")
                    if tok.chunk_index != ci or tok.sentence_index != si:
                        raise ValueError(
                            f"token location ({tok.chunk_index}, {tok.sentence_index}) "
                            f"inconsistent with nesting position ({ci}, {si}) in {self.doc_id!r}")

    def tokens(self) -> Iterator[NounPhraseToken]:
        for chunk in self.chunks:
            for sentence in chunk:
                yield from sentence

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for c in self.chunks for s in c)


class Vocabulary:
    """Dense bijection between distinct triplet tuples and integer ids,
    in first-appearance order."""

    def __init__(self, keys: Iterable[tuple[str, str, str]] = ()):
        self._id_of: dict[tuple[str, str, str], int] = {}
        self._keys: list[tuple[str, str, str]] = []
        for key in keys:
            self.add(key)

    def add(self, key: tuple[str, str, str]) -> int:
        if key not in self._id_of:
            self._id_of[key] = len(self._keys)
            self._keys.append(key)
        return self._id_of[key]

    def id_of(self, key: tuple[str, str, str]) -> int:
        return self._id_of[key]

    def key_of(self, word_id: int) -> tuple[str, str, str]:
        return self._keys[word_id]

    def keys(self) -> list[tuple[str, str, str]]:
        return list(self._keys)

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key) -> bool:
        return key in self._id_of


class Corpus:
    """Immutable document collection with a shared triplet vocabulary."""

    def __init__(self, documents: Iterable[Document]):
        self.documents: tuple[Document, ...] = tuple(documents)
        seen = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise ValueError(f"duplicate doc_id {doc.doc_id!r}")
            seen.add(doc.doc_id)
        self.vocabulary = Vocabulary(
            t.key() for doc in self.documents for tok in doc.tokens() for t in tok.triplets)

    def tokens(self) -> Iterator[NounPhraseToken]:
        """All tokens in reading order (document, chunk, sentence, position)."""
        for doc in self.documents:
            yield from doc.tokens()

    def triplets(self) -> Iterator[RelationTriplet]:
        for doc in self.documents:
            for tok in doc.tokens():
                yield from tok.triplets

    @property
    def doc_ids(self) -> list[str]:
        return [d.doc_id for d in self.documents]

    @property
    def n_tokens(self) -> int:
        return sum(d.n_tokens for d in self.documents)

    def word_id(self, token: NounPhraseToken) -> int:
        return self.vocabulary.id_of(token.word_key)

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self.documents == other.documents

    def __hash__(self):
        return hash(self.documents)

    def __repr__(self) -> str:
        return (f"Corpus({len(self.documents)} documents, {self.n_tokens} tokens, "
                f"{len(self.vocabulary)} distinct triplets)")


def _parse_triplet(entry, where: str, doc_id: str) -> RelationTriplet:
    if not isinstance(entry, dict):
        raise CorpusFormatError(f"{where}: triplet must be an object")
    for key in ("subject", "verb", "object"):
        if key not in entry:
            raise CorpusFormatError(f"{where}: triplet missing field {key!r}")
        if not isinstance(entry[key], str):
            raise CorpusFormatError(f"{where}: triplet field {key!r} must be a string")
    source = entry.get("source", "ingested")
    if source not in TRIPLET_SOURCES:
        raise CorpusFormatError(f"{where}: unknown triplet source {source!r}")
    subject = normalize_phrase(entry["subject"])
    verb = normalize_phrase(entry["verb"])
    obj = normalize_phrase(entry["object"])
    if not subject or not verb:
        raise CorpusFormatError(f"{where}: triplet subject and verb must be non-empty")
    return RelationTriplet(subject, verb, obj, source=source, doc_id=doc_id)


def _parse_document(record, where: str) -> Document:
    if not isinstance(record, dict):
        raise CorpusFormatError(f"{where}: document must be an object")
    doc_id = record.get("doc_id")
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusFormatError(f"{where}: missing or empty field 'doc_id'")
    chunks_in = record.get("chunks")
    if not isinstance(chunks_in, list):
        raise CorpusFormatError(f"{where}: missing field 'chunks'")
    chunks = []
    for ci, chunk in enumerate(chunks_in):
        if not isinstance(chunk, list):
            raise CorpusFormatError(f"{where}: chunks[{ci}] must be a list of sentences")
        sentences = []
        for si, sentence in enumerate(chunk):
            if not isinstance(sentence, list):
                raise CorpusFormatError(
                    f"{where}: chunks[{ci}][{si}] must be a list of tokens")
            tokens = []
            for ti, tok in enumerate(sentence):
                spot = f"{where}: chunks[{ci}][{si}][{ti}]"
                if not isinstance(tok, dict):
                    raise CorpusFormatError(f"{spot}: token must be an object")
                raw = tok.get("raw")
                if not isinstance(raw, str):
                    raise CorpusFormatError(f"{spot}: missing field 'raw'")
                content = normalize_phrase(raw)
                if not content:
                    raise CorpusFormatError(f"{spot}: phrase {raw!r} is empty after normalization")
                triplets_in = tok.get("triplets")
                if not isinstance(triplets_in, list) or not triplets_in:
                    raise CorpusFormatError(f"{spot}: token must list at least one triplet")
                # One model token per triplet: counts follow triplet occurrences.
                for trip in triplets_in:
                    triplet = _parse_triplet(trip, spot, doc_id)
                    tokens.append(NounPhraseToken(
                        content=content, raw=raw, doc_id=doc_id,
                        chunk_index=ci, sentence_index=si, triplets=(triplet,)))
            sentences.append(tuple(tokens))
        chunks.append(tuple(sentences))
    return Document(doc_id=doc_id, chunks=tuple(chunks))


def corpus_from_lines(lines: Iterable[str], source_name: str = "<corpus>") -> Corpus:
    documents = []
    n_lines = 0
    for ln, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        n_lines += 1
        where = f"{source_name}:{ln}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{where}: invalid JSON: {exc.msg}") from exc
        documents.append(_parse_document(record, where))
    if n_lines == 0:
        raise CorpusFormatError(f"{source_name}: empty corpus")
    try:
        return Corpus(documents)
    except ValueError as exc:
        raise CorpusFormatError(f"{source_name}: {exc}") from exc


def load_corpus(path: str | Path, config=None) -> Corpus:
    """Load and validate a JSONL corpus. `config` is accepted for interface
    stability; loading is configuration-independent."""
    path = Path(path)
    with io.open(path, "r", encoding="utf-8") as fh:
        return corpus_from_lines(fh, source_name=str(path))


def _token_record(tok: NounPhraseToken) -> dict:
    triplets = []
    for t in tok.triplets:
        entry = {"subject": t.subject, "verb": t.verb, "object": t.object}
        if t.source != "ingested":
            entry["source"] = t.source
        triplets.append(entry)
    return {"raw": tok.raw, "triplets": triplets}


def dump_corpus(corpus: Corpus) -> str:
    """Serialize to the JSONL ingestion format (canonical field order).
    Reloading the result yields an equal Corpus."""
    lines = []
    for doc in corpus.documents:
        record = {
            "doc_id": doc.doc_id,
            "chunks": [[[_token_record(t) for t in sentence] for sentence in chunk]
                       for chunk in doc.chunks],
        }
        lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
    return "\n".join(lines) + "\n"
