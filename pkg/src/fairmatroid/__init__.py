"""Fair monotone submodular maximization under a matroid constraint."""
from .matroids import (ExplicitMatroid, MalformedInputError, PartitionMatroid, PreconditionError,
                       SizeError, UniformMatroid, can_exchange, check_axioms,
                       greedy_max_independent, is_independent)
from .objectives import (Coverage, Evaluator, ExemplarClustering, Linear, RecommenderBlend,
                         check_monotone_submodular)
from .fairness import (FairnessSpec, Saturation, classify_saturation, deficiency_k, fav,
                       upper_matroid)
from .exchange import (ExchangeGraph, ExchangeSet, InvariantError, Matching, apply_exchange,
                       bipartite_max_matching, build_exchange_graph, fast_paths_partition,
                       generate_paths, generate_paths_two_matroids)
from .algorithms import (RunConfig, RunRecord, baseline_lbmi, baseline_random, baseline_twopass,
                         baseline_ubmi, brute_force, build_fair_base, greedy_intersection,
                         max_card_intersection, run_deterministic_two_matroids, run_randomized)

__version__ = "0.1.0"
