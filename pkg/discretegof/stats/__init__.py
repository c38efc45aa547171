from .dense import (
    chi2_statistic,
    euclidean_statistic,
    freeman_tukey_statistic,
    g2_statistic,
    ks_statistic,
    l1_statistic,
    statistic,
    statistic_values,
    worst_case_ks,
    worst_case_ordering,
)
from .kinds import Ordering, OrderingKind, StatisticKind, permutation_digest
from .sparse import sparse_euclidean, sparse_ks

__all__ = [
    "Ordering",
    "OrderingKind",
    "StatisticKind",
    "chi2_statistic",
    "euclidean_statistic",
    "freeman_tukey_statistic",
    "g2_statistic",
    "ks_statistic",
    "l1_statistic",
    "permutation_digest",
    "sparse_euclidean",
    "sparse_ks",
    "statistic",
    "statistic_values",
    "worst_case_ks",
    "worst_case_ordering",
]
