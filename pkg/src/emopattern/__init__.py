"""Graph-based extraction of emotion-bearing patterns.

Word co-occurrence graphs of subjective and objective text are contrasted to
find connector and subject words.  Template patterns built from them are
weighted per emotion with pf-ief and drive a rank-based emotion classifier.
"""

from .categorize import TokenSets, adjacency, clustering_coefficients, eigenvector_centrality
from .cograph import TokenGraph, aggregate, build_graph, normalize_weights, prune
from .corpus import Document, LabeledCorpus, label_from_hashtag, normalize, split
from .embclust import ClusterAssignment, EmbeddingTable, cluster, completeness, homogeneity, load_embeddings
from .evaluation import ConfusionMatrix, coverage, f1_report, tfidf_baseline
from .evm import EvmModel, classify
from .patterns import Pattern, PatternMatcher, extract_basic, extract_enriched, match, scan
from .weighting import count, rank, score

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment", "ConfusionMatrix", "Document", "EmbeddingTable", "EvmModel", "LabeledCorpus",
    "Pattern", "PatternMatcher", "TokenGraph", "TokenSets",
    "adjacency", "aggregate", "build_graph", "classify", "cluster", "clustering_coefficients",
    "completeness", "count", "coverage", "eigenvector_centrality", "extract_basic", "extract_enriched",
    "f1_report", "homogeneity", "label_from_hashtag", "load_embeddings", "match", "normalize",
    "normalize_weights", "prune", "rank", "scan", "score", "split", "tfidf_baseline",
]
