__all__ = [
    "errors",
    "euler",
    "formats",
    "graph",
    "harness",
    "instances",
    "reductions",
    "rounding",
    "schemes",
    "Bicolouring",
    "EdgeColouring",
    "Graph",
    "MajorityVerdict",
    "RoundingResult",
    "RunReport",
    "SchemeReport",
    "SearchOutcome",
    "WeightAssignment",
    "balanced_bicolouring",
    "bipartite_lower_bound",
    "build_graph",
    "check_majority",
    "colour_auto",
    "colour_bipartite",
    "colour_general_2k2",
    "colour_refined",
    "colour_small_k",
    "eulerian_circuit",
    "exhaustive_search",
    "general_lower_bound",
    "pull_back_colouring",
    "random_min_degree_graph",
    "reduce_to_sk",
    "round_weights",
]

from . import errors, euler, formats, graph, harness, instances, reductions, rounding, schemes
from .euler import Bicolouring, balanced_bicolouring
from .graph import EdgeColouring, Graph, MajorityVerdict, build_graph, check_majority, eulerian_circuit
from .harness import RunReport
from .instances import (
    SearchOutcome,
    bipartite_lower_bound,
    exhaustive_search,
    general_lower_bound,
    random_min_degree_graph,
)
from .reductions import pull_back_colouring, reduce_to_sk
from .rounding import RoundingResult, WeightAssignment, round_weights
from .schemes import (
    SchemeReport,
    colour_auto,
    colour_bipartite,
    colour_general_2k2,
    colour_refined,
    colour_small_k,
)
