"""Edge counting with independent-set queries."""

__version__ = "0.1.0"

from .degree_oracle import (
    BucketLabel,
    MemoizedDegreeOracle,
    check_high_degree,
    check_hl_degree,
    check_low_degree,
    high_low,
    sim_d_high,
    sim_d_low,
)
from .errors import BudgetExceededError, ContractViolationError, InvalidInputError
from .estimator import (
    BucketEstimates,
    RunReport,
    estimate_edges,
    estimate_Li,
    estimate_with_advice,
    high_degree_bucket,
    high_degree_event,
)
from .generators import (
    PlantedInstance,
    gen_complete_bipartite,
    gen_coupled,
    gen_dno,
    gen_dyes,
    gen_empty,
    gen_erdos_renyi,
    gen_matching,
    gen_star,
    gen_union,
)
from .graph import Graph, load_edgelist, save_edgelist
from .lowerbound import (
    AugmentedOracle,
    KnowledgeTriple,
    aug_query,
    distinguishing_experiment,
    simulate_is_via_augmented,
)
from .oracle import IndependenceOracle, InstrumentedOracle, SetBatch
from .params import Params, Tunables
from .rng import sample_bernoulli_subset
from .search import find_incident_edge, random_binary_search

__all__ = [
    "__version__",
    "BudgetExceededError",
    "ContractViolationError",
    "IndependenceOracle",
    "InstrumentedOracle",
    "InvalidInputError",
    "SetBatch",
    "AugmentedOracle",
    "BucketEstimates",
    "BucketLabel",
    "Graph",
    "KnowledgeTriple",
    "MemoizedDegreeOracle",
    "Params",
    "PlantedInstance",
    "RunReport",
    "Tunables",
    "aug_query",
    "check_high_degree",
    "check_hl_degree",
    "check_low_degree",
    "distinguishing_experiment",
    "estimate_Li",
    "estimate_edges",
    "estimate_with_advice",
    "find_incident_edge",
    "gen_complete_bipartite",
    "gen_coupled",
    "gen_dno",
    "gen_dyes",
    "gen_empty",
    "gen_erdos_renyi",
    "gen_matching",
    "gen_star",
    "gen_union",
    "high_degree_bucket",
    "high_degree_event",
    "high_low",
    "load_edgelist",
    "random_binary_search",
    "sample_bernoulli_subset",
    "save_edgelist",
    "sim_d_high",
    "sim_d_low",
    "simulate_is_via_augmented",
]
