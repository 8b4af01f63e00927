"""Rule-based relation triplet extraction from itemized text and simple
sentence patterns.

Two deterministic sources, no external language parser:

* structural — indentation of itemized lines encodes inclusion, so a line
  one level deeper than its nearest preceding shallower line yields
  ``(line, "be a subtopic of", ancestor)``;
* pattern — a shallow subject/verb/object split over a closed verb list,
  plus a title-noun rule ("Queen Elizabeth" -> (elizabeth, be, queen)).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Document, NounPhraseToken, RelationTriplet, normalize_phrase

SUBTOPIC_PREDICATE = "be a subtopic of"

BE_FORMS = frozenset({"be", "is", "are", "was", "were", "am", "been", "being"})

# Closed verb list: inflection -> lemma. Pattern extraction only fires on
# these; anything else is left to the ingestion format.
VERB_LEMMAS = {
    "have": "have", "has": "have", "had": "have",
    "give": "give", "gives": "give", "gave": "give",
    "contain": "contain", "contains": "contain", "contained": "contain",
    "include": "include", "includes": "include", "included": "include",
    "use": "use", "uses": "use", "used": "use",
    "make": "make", "makes": "make", "made": "make",
    "hold": "hold", "holds": "hold", "held": "hold",
    "require": "require", "requires": "require", "required": "require",
    "produce": "produce", "produces": "produce", "produced": "produce",
    "connect": "connect", "connects": "connect", "connected": "connect",
    "depend": "depend", "depends": "depend", "depended": "depend",
}

PREPOSITIONS = frozenset({
    "in", "of", "on", "at", "for", "from", "by", "to", "with",
    "over", "under", "between", "near", "within",
})

TITLE_LEXICON = frozenset({
    "queen", "king", "president", "professor", "doctor", "prince",
    "princess", "sir", "lady", "lord", "captain", "general", "senator",
    "judge", "mayor", "saint", "emperor", "chancellor",
})

_IRREGULAR_PARTICIPLES = {
    "give": "given", "make": "made", "take": "taken", "have": "had",
    "hold": "held", "know": "known", "find": "found", "see": "seen",
    "write": "written", "build": "built", "grow": "grown", "show": "shown",
    "run": "run", "put": "put", "buy": "bought", "sell": "sold",
}

_WORD_RE = re.compile(r"[^\s]+")
_NUMERIC_RE = re.compile(r"[-+]?\d[\d.,]*")


@dataclass(frozen=True)
class ItemizedDoc:
    """Itemized text: ordered (indent_level, text) lines, blanks removed."""

    doc_id: str
    lines: tuple[tuple[int, str], ...]

    def __post_init__(self):
        for level, text in self.lines:
            if level < 0:
                raise ValueError(f"negative indent level {level}")
            if not text.strip():
                raise ValueError("itemized lines must be non-blank")


def parse_itemized_text(text: str, doc_id: str = "doc",
                        spaces_per_indent: int = 2) -> ItemizedDoc:
    """Parse itemized UTF-8 text. Indent level is the count of leading tabs,
    or leading spaces divided by `spaces_per_indent` for space-indented lines."""
    if spaces_per_indent < 1:
        raise ValueError("spaces_per_indent must be >= 1")
    lines = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("\t"):
            level = len(line) - len(line.lstrip("\t"))
        else:
            level = (len(line) - len(line.lstrip(" "))) // spaces_per_indent
        lines.append((level, line.strip()))
    return ItemizedDoc(doc_id=doc_id, lines=tuple(lines))


def extract_structural_triplets(doc: ItemizedDoc) -> tuple[list[RelationTriplet], Document]:
    """Turn line indentation into subtopic triplets.

    Each line with a nearest preceding shallower line emits
    (line, "be a subtopic of", ancestor); indent jumps larger than one are
    tolerated. Also returns the doc as a one-chunk Document whose tokens are
    the triplet-bearing lines, for direct corpus ingestion.
    """
    triplets: list[RelationTriplet] = []
    tokens: list[tuple[str, RelationTriplet]] = []
    stack: list[tuple[int, str]] = []  # (level, normalized phrase) of open ancestors
    for level, text in doc.lines:
        phrase = normalize_phrase(text)
        while stack and stack[-1][0] >= level:
            stack.pop()
        if stack and phrase:
            parent = stack[-1][1]
            triplet = RelationTriplet(
                subject=phrase, verb=SUBTOPIC_PREDICATE, object=parent,
                source="structural", doc_id=doc.doc_id)
            triplets.append(triplet)
            tokens.append((text, triplet))
        if phrase:
            stack.append((level, phrase))

    sentences = tuple(
        (NounPhraseToken(
            content=normalize_phrase(raw), raw=raw, doc_id=doc.doc_id,
            chunk_index=0, sentence_index=si, triplets=(triplet,)),)
        for si, (raw, triplet) in enumerate(tokens))
    document = Document(doc_id=doc.doc_id, chunks=(sentences,) if sentences else ())
    return triplets, document


def _title_matches(words: list[str]) -> list[tuple[str, str]]:
    """(name, title) pairs for capitalized `Title ProperName...` bigrams."""
    matches = []
    for i in range(len(words) - 1):
        title = normalize_phrase(words[i])
        if title not in TITLE_LEXICON or not words[i][:1].isupper():
            continue
        j = i + 1
        name_words = []
        while j < len(words) and words[j][:1].isupper():
            name_words.append(words[j])
            j += 1
        if name_words:
            name = normalize_phrase(" ".join(name_words))
            if name:
                matches.append((name, title))
    return matches


def extract_pattern_triplets(sentence: str, doc_id: str = "") -> list[RelationTriplet]:
    """Shallow pattern extraction over one sentence.

    Rule (a): split at the first closed-list verb; a copula predicate
    absorbs the complement up to and including its first preposition
    ("X is the largest city in Y" -> (x, be the largest city in, y)).
    Rule (b): title-noun ("Queen Elizabeth" -> (elizabeth, be, queen)).
    No match yields an empty list.
    """
    words = _WORD_RE.findall(sentence)
    results: list[RelationTriplet] = []

    for vi, word in enumerate(words):
        lowered = normalize_phrase(word)
        if vi == 0 or vi == len(words) - 1:
            continue
        subject = normalize_phrase(" ".join(words[:vi]))
        rest = words[vi + 1:]
        if lowered in BE_FORMS:
            verb_words = ["be"]
            obj_words = rest
            for pi, w in enumerate(rest[:-1]):
                if normalize_phrase(w) in PREPOSITIONS:
                    verb_words = ["be"] + [normalize_phrase(x) for x in rest[:pi + 1]]
                    obj_words = rest[pi + 1:]
                    break
        elif lowered in VERB_LEMMAS:
            verb_words = [VERB_LEMMAS[lowered]]
            obj_words = rest
            if len(rest) > 1 and normalize_phrase(rest[0]) in PREPOSITIONS:
                verb_words.append(normalize_phrase(rest[0]))
                obj_words = rest[1:]
        else:
            continue
        obj = normalize_phrase(" ".join(obj_words))
        verb = " ".join(w for w in verb_words if w)
        if subject and obj and verb:
            results.append(RelationTriplet(
                subject=subject, verb=verb, object=obj,
                source="pattern", doc_id=doc_id))
        break

    for name, title in _title_matches(words):
        results.append(RelationTriplet(
            subject=name, verb="be", object=title, source="pattern", doc_id=doc_id))
    return results


def _past_participle(verb: str) -> str:
    if verb in _IRREGULAR_PARTICIPLES:
        return _IRREGULAR_PARTICIPLES[verb]
    if verb.endswith("e"):
        return verb + "d"
    return verb + "ed"


def _is_literal(obj: str) -> bool:
    return (not obj) or obj[0] in "\"'" or _NUMERIC_RE.fullmatch(obj) is not None


def passive_inverse(t: RelationTriplet) -> RelationTriplet:
    """Passive-voice inversion: (tiger, give, speech) -> (speech, be given by, tiger).

    Copula relations have no meaningful passive, and literal objects cannot
    be subjects; both raise ValueError("not invertible ...").
    """
    head, *tail = t.verb.split()
    if head in BE_FORMS:
        raise ValueError(f"not invertible: copula relation {t.verb!r}")
    if _is_literal(t.object):
        raise ValueError(f"not invertible: literal object {t.object!r}")
    verb = " ".join(["be", _past_participle(head), *tail, "by"])
    return RelationTriplet(subject=t.object, verb=verb, object=t.subject,
                           source="passive-inverse", doc_id=t.doc_id)


def document_from_sentences(sentences: list[tuple[str, list[RelationTriplet]]],
                            doc_id: str) -> Document:
    """One-chunk Document from (sentence text, extracted triplets) pairs;
    each triplet becomes a token whose phrase is the triplet subject."""
    built = []
    si = 0
    for _text, triplets in sentences:
        if not triplets:
            continue
        toks = tuple(
            NounPhraseToken(content=t.subject, raw=t.subject, doc_id=doc_id,
                            chunk_index=0, sentence_index=si, triplets=(t,))
            for t in triplets)
        built.append(toks)
        si += 1
    return Document(doc_id=doc_id, chunks=(tuple(built),) if built else ())
