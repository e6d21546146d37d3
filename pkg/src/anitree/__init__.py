"""Similarity spanning-tree analytics for anime-style item catalogs.

Pipeline: catalog -> pairwise similarity measures -> fused distances ->
minimum spanning tree -> centralities -> neighbor/path queries.
"""

from ._backend import available_backends, get_backend
from .centrality import (
    CentralityReport,
    betweenness_brandes,
    betweenness_centrality,
    closeness_bfs,
    closeness_centrality,
    compute_report,
    degree_centrality,
    eigenvector_centrality,
    read_report,
    total_centrality,
    write_report,
)
from .dataset import (
    DEFAULT_N_CATEGORIES,
    AnimeRecord,
    Catalog,
    generate_synthetic,
    load_catalog,
    save_catalog,
)
from .errors import (
    CatalogError,
    ConvergenceError,
    DimensionError,
    EmptyHistogramError,
    NotConnectedError,
    UnknownItemError,
)
from .mst import DisjointSet, SpanningTree, WeightedEdge, kruskal, kruskal_pairs
from .query import PathResult, k_nearest, neighbors, path
from .similarity import (
    DELTA_MAX,
    NormalizationStats,
    PairTable,
    RawPairs,
    ScoreHistogram,
    SimilarityVector,
    build_pair_table,
    compute_raw_pairs,
    crew_similarity,
    fuse,
    normalize,
    normalize_pairs,
    pair_count,
    pair_index,
    pair_members,
    pair_stats,
    pair_table_from_cache,
    read_pair_cache,
    score_histogram,
    score_similarity,
    topic_similarity,
    write_pair_cache,
)

__version__ = "0.1.0"
