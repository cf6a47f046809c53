"""Backbone extraction for weighted networks from overlapping community structure."""

from .backbone import (
    Backbone,
    EmptyOverlapError,
    ExtractionError,
    TuningError,
    disparity_filter,
    disparity_significance,
    ego_backbone,
    enforce_size,
    hubs_backbone,
    prune_low_weight_edges,
    select_hubs,
    tune_alpha,
)
from .community import (
    CommunityCover,
    OverlapSets,
    detect_communities,
    overlap_neighborhood,
    overlapping_nodes,
    read_cover,
    write_cover,
)
from .graph import (
    WeightedGraph,
    betweenness,
    connected_components,
    induced_subgraph,
    is_bridge,
    load_edge_list,
    loads_edge_list,
    weighted_degree,
    write_edge_list,
)
from .metrics import (
    EffectivenessSummary,
    RankedNodeList,
    common_nodes_fraction,
    effectiveness_summary,
    kendall_tau,
    pearson,
    rank_biased_overlap,
    rank_nodes,
    top_preservation,
)
from .datasets import load_dataset

__version__ = "0.1.0"

__all__ = [
    "Backbone",
    "betweenness",
    "common_nodes_fraction",
    "CommunityCover",
    "connected_components",
    "detect_communities",
    "disparity_filter",
    "disparity_significance",
    "effectiveness_summary",
    "EffectivenessSummary",
    "ego_backbone",
    "EmptyOverlapError",
    "enforce_size",
    "ExtractionError",
    "hubs_backbone",
    "induced_subgraph",
    "is_bridge",
    "kendall_tau",
    "load_dataset",
    "load_edge_list",
    "loads_edge_list",
    "overlap_neighborhood",
    "overlapping_nodes",
    "OverlapSets",
    "pearson",
    "prune_low_weight_edges",
    "rank_biased_overlap",
    "rank_nodes",
    "RankedNodeList",
    "read_cover",
    "select_hubs",
    "top_preservation",
    "tune_alpha",
    "TuningError",
    "weighted_degree",
    "WeightedGraph",
    "write_cover",
    "write_edge_list",
]
