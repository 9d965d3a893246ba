"""1-factorizations of dense regular graphs."""

from ._core import (
    Graph,
    OneFactorError,
    __version__,
    canonical_hash,
    complete_graph,
    count_factorizations,
    count_perfect_matchings,
    factorize,
    lower_bound_log,
    nibble,
    parse_edge_list,
    permanent,
    random_regular,
    verify,
)

__all__ = [
    "Graph",
    "OneFactorError",
    "canonical_hash",
    "complete_graph",
    "count_factorizations",
    "count_perfect_matchings",
    "factorize",
    "lower_bound_log",
    "nibble",
    "parse_edge_list",
    "permanent",
    "random_regular",
    "verify",
]
