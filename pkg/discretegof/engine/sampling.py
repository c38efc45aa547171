"""Simulated experiments: n i.i.d. draws from a model."""

import numpy as np

from ..errors import InvalidArgument
from ..models.distribution import BinDistribution, EmpiricalCounts
from ..models.sparse import SparseUniformModel


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f"Number of draws must be a positive integer, got {n!r}")
    return int(n)


def multinomial_counts(probs: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Counts of n categorical draws. numpy draws these by conditional binomials
    (one binomial per bin), so the cost does not grow with n.
    """
    return rng.multinomial(n, probs)


def uniform_draws(support_size: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws uniformly from 1..support_size."""
    return rng.integers(1, support_size, size=n, endpoint=True, dtype=np.int64)


def sample_counts(model: BinDistribution, n: int, rng: np.random.Generator) -> EmpiricalCounts:
    """Multinomial(n, model) counts, dense, with the model's labels."""
    n = _check_n(n)
    if model.is_sparse:
        raise InvalidArgument("Use sample_sparse_uniform for sparse models")
    return EmpiricalCounts(multinomial_counts(model.probs, n, rng), model.labels)


def sample_sparse_uniform(model: SparseUniformModel, n: int, rng: np.random.Generator) -> EmpiricalCounts:
    """Sparse counts of n uniform draws from 1..M."""
    n = _check_n(n)
    return EmpiricalCounts.from_draws(uniform_draws(model.support_size, n, rng), model.support_size)
