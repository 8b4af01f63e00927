"""Model and ontology quality metrics: perplexity, gold-standard
precision/recall/F-measure, and cluster purity."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import CorpusFormatError, normalize_phrase
from .hierarchy import TopicTree
from .lda import GibbsState, PosteriorEstimates
from .ontology import Ontology

SUBCLASS_RULE_VERB = "subclass-of"


def perplexity(token_probs: Iterable[float]) -> float:
    """exp of the negative mean log token probability; lower is better."""
    total = 0.0
    count = 0
    for p in token_probs:
        if p <= 0.0:
            raise ValueError("token probability must be positive")
        total += math.log(p)
        count += 1
    if count == 0:
        raise ValueError("perplexity of zero tokens is undefined")
    return math.exp(-total / count)


def token_probabilities(state: GibbsState, estimates: PosteriorEstimates) -> list[float]:
    """Per-token modeled probability: relation given topic times topic given
    document, from the smoothed estimates."""
    beta, theta = estimates.beta_hat, estimates.theta_hat
    return [float(beta[k, w] * theta[d, k])
            for d, w, k in zip(state.docs, state.words, state.z)]


def node_perplexity(state: GibbsState, estimates: PosteriorEstimates) -> float:
    return perplexity(token_probabilities(state, estimates))


def tree_perplexity(tree: TopicTree) -> dict:
    """Per-level and token-weighted overall perplexity across fitted nodes.

    A node fitted at level l models its member tokens with the level l+1
    topics, so its tokens are reported under level l+1.
    """
    by_level: dict[int, list[float]] = {}
    for node in tree.nodes():
        if node.fitted is None:
            continue
        state, estimates = node.fitted
        by_level.setdefault(node.level + 1, []).extend(
            token_probabilities(state, estimates))
    levels = {level: perplexity(probs) for level, probs in sorted(by_level.items())}
    all_probs = [p for probs in by_level.values() for p in probs]
    overall = perplexity(all_probs) if all_probs else None
    return {"levels": levels, "overall": overall}


@dataclass(frozen=True)
class GoldRuleSet:
    """Reference rules: (child, subclass-of, parent) or (subject, verb, object)."""

    rules: frozenset[tuple[str, str, str]]


def load_gold_rules(path: str | Path) -> GoldRuleSet:
    """JSON array of 3-string tuples, normalized like every engine phrase."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise CorpusFormatError(f"{path}: gold rules must be a JSON array")
    rules = set()
    for i, entry in enumerate(data):
        if not (isinstance(entry, list) and len(entry) == 3
                and all(isinstance(x, str) for x in entry)):
            raise CorpusFormatError(f"{path}: entry {i}: expected three strings")
        rules.add(tuple(normalize_phrase(x) for x in entry))
    return GoldRuleSet(rules=frozenset(rules))


def ontology_rules(ontology: Ontology) -> frozenset[tuple[str, str, str]]:
    """The ontology as a comparable rule set."""
    edges = {(child, SUBCLASS_RULE_VERB, parent)
             for child, parent in ontology.subclass_edges}
    return frozenset(edges | set(ontology.assertions))


@dataclass(frozen=True)
class PrfReport:
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f_measure: float


def compare_gold(extracted: Ontology | frozenset, gold: GoldRuleSet) -> PrfReport:
    """Set-exact rule comparison; 0/0 ratios resolve to 0 by convention."""
    rules = ontology_rules(extracted) if isinstance(extracted, Ontology) else frozenset(extracted)
    tp = len(rules & gold.rules)
    fp = len(rules - gold.rules)
    fn = len(gold.rules - rules)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f_measure = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PrfReport(true_positives=tp, false_positives=fp, false_negatives=fn,
                     precision=precision, recall=recall, f_measure=f_measure)


def cluster_purity(assignment: Mapping, truth: Mapping) -> float:
    """Fraction of items whose cluster is dominated by their true domain."""
    if set(assignment) != set(truth):
        raise ValueError("assignment and truth must cover the same items")
    if not assignment:
        raise ValueError("purity of zero items is undefined")
    clusters: dict[object, dict[object, int]] = {}
    for item, cluster in assignment.items():
        domain_counts = clusters.setdefault(cluster, {})
        domain = truth[item]
        domain_counts[domain] = domain_counts.get(domain, 0) + 1
    matched = sum(max(counts.values()) for counts in clusters.values())
    return matched / len(assignment)
