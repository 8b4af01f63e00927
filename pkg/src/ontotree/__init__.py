"""Terminological ontology extraction from annotated corpora.

A corpus of located noun-phrase tokens carrying relation triplets is turned
into a topic hierarchy plus relation assertions: topic counts per node come
from a closeness-aware Chinese restaurant process, per-node topic fits from
collapsed Gibbs sampling over the triplet vocabulary, and the labeled tree
is exported as a subclass forest with attached relations.
"""

__version__ = "0.1.0"

from .config import CorpusConfig, derive_seed, load_config
from .corpus import (Corpus, CorpusFormatError, Document, NounPhraseToken,
                     RelationTriplet, SynonymLexicon, dump_corpus,
                     is_synonym_or_acronym, load_corpus, load_synonym_lexicon,
                     normalize_phrase)
from .crp import (PartitionScores, PartitionState, estimate_topic_count,
                  partition_pass, partition_scores, sample_assignment)
from .evaluation import (GoldRuleSet, PrfReport, cluster_purity, compare_gold,
                         load_gold_rules, node_perplexity, ontology_rules,
                         perplexity, tree_perplexity)
from .hierarchy import (TopicNode, TopicTree, build_tree, rank_topic_phrases,
                        select_topic_label, serialize_tree, topic_paths)
from .lda import (GibbsState, PosteriorEstimates, gibbs_conditional,
                  gibbs_sweep, posterior_estimates, train_node)
from .ontology import (Ontology, TripletGraph, build_triplet_graph,
                       export_ontology, filter_corpus, filter_ontology,
                       link_relations, load_ontology, prune)
from .triplets import (ItemizedDoc, extract_pattern_triplets,
                       extract_structural_triplets, parse_itemized_text,
                       passive_inverse)

__all__ = [
    "__version__",
    "CorpusConfig", "derive_seed", "load_config",
    "Corpus", "CorpusFormatError", "Document", "NounPhraseToken",
    "RelationTriplet", "SynonymLexicon", "dump_corpus", "is_synonym_or_acronym",
    "load_corpus", "load_synonym_lexicon", "normalize_phrase",
    "PartitionScores", "PartitionState", "estimate_topic_count",
    "partition_pass", "partition_scores", "sample_assignment",
    "GoldRuleSet", "PrfReport", "cluster_purity", "compare_gold",
    "load_gold_rules", "node_perplexity", "ontology_rules", "perplexity",
    "tree_perplexity",
    "TopicNode", "TopicTree", "build_tree", "rank_topic_phrases",
    "select_topic_label", "serialize_tree", "topic_paths",
    "GibbsState", "PosteriorEstimates", "gibbs_conditional", "gibbs_sweep",
    "posterior_estimates", "train_node",
    "Ontology", "TripletGraph", "build_triplet_graph", "export_ontology",
    "filter_corpus", "filter_ontology", "link_relations", "load_ontology",
    "prune",
    "ItemizedDoc", "extract_pattern_triplets", "extract_structural_triplets",
    "parse_itemized_text", "passive_inverse",
]
