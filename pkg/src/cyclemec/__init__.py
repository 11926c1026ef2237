"""Markov equivalence of directed graphs that may contain cycles.

The package goes from conditional-independence statements to a concrete
graph in three stages: score partially ordered partitions of the vertex
set (:mod:`cyclemec.scoring`), search for a score-minimal one
(:mod:`cyclemec.search`), then recover edges block by block with either a
randomized construct-and-correct pass (:mod:`cyclemec.construct`) or a
flow-polytope enumeration (:mod:`cyclemec.flow`).  Everything is exact and
meant for small vertex counts; the d-separation oracle enumerates all
conditioning sets.
"""

from .builder import (
    BuildOutcome,
    InstanceError,
    SccrInstance,
    build_graph,
    check_partition_feasible,
    derive_instances,
    derive_instances_from_graph,
    format_instance,
    linear_extension,
    parse_instance,
)
from .construct import construct_correct, validate_output
from .dsep import (
    CiError,
    CiOracle,
    d_connected,
    enumerate_ci,
    format_ci,
    graph_ci,
    parse_ci,
)
from .flow import FlowSizeError, solve_flow
from .graphs import DirectedGraph, GraphError, format_graph, parse_graph
from .mec import (
    MecSummary,
    ci_equivalent,
    equivalence_conditions,
    graph_summary,
    markov_equivalent,
    p_adjacencies,
)
from .partitions import (
    OrderedPartition,
    PartitionError,
    enumerate_all,
    format_partition,
    parse_partition,
)
from .scoring import compute_summary, score_vector
from .search import SearchConfig, SearchResult, greedy_discover

__all__ = [
    "BuildOutcome",
    "CiError",
    "CiOracle",
    "DirectedGraph",
    "FlowSizeError",
    "GraphError",
    "InstanceError",
    "MecSummary",
    "OrderedPartition",
    "PartitionError",
    "SccrInstance",
    "SearchConfig",
    "SearchResult",
    "build_graph",
    "check_partition_feasible",
    "ci_equivalent",
    "compute_summary",
    "construct_correct",
    "d_connected",
    "derive_instances",
    "derive_instances_from_graph",
    "enumerate_all",
    "enumerate_ci",
    "equivalence_conditions",
    "format_ci",
    "format_graph",
    "format_instance",
    "format_partition",
    "graph_ci",
    "graph_summary",
    "greedy_discover",
    "linear_extension",
    "markov_equivalent",
    "p_adjacencies",
    "parse_ci",
    "parse_graph",
    "parse_instance",
    "parse_partition",
    "score_vector",
    "solve_flow",
    "validate_output",
]
