"""Probability models over bins and observed bin counts."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import MAX_TOTAL_COUNT, PROBABILITY_ATOL, SPARSE_THRESHOLD
from ..errors import InvalidArgument


def _as_labels(labels, size) -> Optional[Tuple[str, ...]]:
    if labels is None:
        return None
    labels = tuple(str(label) for label in labels)
    if len(labels) != size:
        raise InvalidArgument(f"Expected {size} labels, got {len(labels)}")
    if len(set(labels)) != size:
        raise InvalidArgument("Bin labels must be unique")
    return labels


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BinDistribution:
    """
    Probability per bin.

    Dense form: one probability per bin, `indices` is None.
    Sparse form: `indices` lists the 1-based occupied bins of a support of
    `support_size` bins; every other bin has probability zero.
    """
    probs: np.ndarray
    labels: Optional[Tuple[str, ...]] = None
    indices: Optional[np.ndarray] = None
    support_size: int = 0

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64).ravel()
        if probs.size == 0:
            raise InvalidArgument("A distribution needs at least one bin")
        if not np.all(np.isfinite(probs)):
            raise InvalidArgument("Probabilities must be finite")
        if np.any(probs < 0):
            raise InvalidArgument("Probabilities must be nonnegative")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROBABILITY_ATOL:
            raise InvalidArgument(
                f"Probabilities sum to {total!r}, not 1 within {PROBABILITY_ATOL}"
            )
        object.__setattr__(self, "probs", _frozen(probs))

        if self.indices is None:
            object.__setattr__(self, "support_size", probs.size)
            object.__setattr__(self, "labels", _as_labels(self.labels, probs.size))
            return

        indices = np.array(self.indices, dtype=np.int64).ravel()
        if indices.size != probs.size:
            raise InvalidArgument("Sparse distribution needs one index per probability")
        if indices.size and (indices[0] < 1 or indices[-1] > self.support_size):
            raise InvalidArgument(f"Bin indices must lie in 1..{self.support_size}")
        if np.any(np.diff(indices) <= 0):
            raise InvalidArgument("Sparse bin indices must be strictly increasing")
        object.__setattr__(self, "indices", _frozen(indices))

    @property
    def is_sparse(self) -> bool:
        return self.indices is not None

    @property
    def num_bins(self) -> int:
        return self.support_size

    def as_dict(self) -> Dict:
        """Map label (or sparse index) to probability."""
        if self.is_sparse:
            return dict(zip(self.indices.tolist(), self.probs.tolist()))
        keys = self.labels if self.labels is not None else range(self.num_bins)
        return dict(zip(keys, self.probs.tolist()))

    def permuted(self, perm: Sequence[int]) -> "BinDistribution":
        """Same distribution with bins reordered as probs[perm]."""
        if self.is_sparse:
            raise InvalidArgument("Sparse distributions cannot be permuted")
        perm = np.asarray(perm, dtype=np.int64)
        labels = None if self.labels is None else [self.labels[i] for i in perm]
        return BinDistribution(self.probs[perm], labels)


@dataclass(frozen=True, eq=False)
class EmpiricalCounts:
    """
    Observed draw counts per bin.

    Dense form: `counts[j]` is the count of bin j (0-based position).
    Sparse form: `indices` are the 1-based occupied bins of a support of
    `support_size` bins and `counts` their strictly positive counts.
    """
    counts: np.ndarray
    labels: Optional[Tuple[str, ...]] = None
    indices: Optional[np.ndarray] = None
    support_size: int = 0
    n: int = field(init=False, default=0)

    def __post_init__(self):
        raw = np.asarray(self.counts)
        if raw.size and not np.issubdtype(raw.dtype, np.integer):
            if not np.all(np.equal(np.mod(raw, 1), 0)):
                raise InvalidArgument("Counts must be integers")
        if raw.size and np.any(raw > MAX_TOTAL_COUNT):
            raise InvalidArgument(f"Counts must not exceed {MAX_TOTAL_COUNT}")
        try:
            counts = raw.astype(np.int64).ravel()
        except OverflowError:
            raise InvalidArgument(f"Counts must not exceed {MAX_TOTAL_COUNT}") from None
        if np.any(counts < 0):
            raise InvalidArgument("Counts must be nonnegative")
        total = sum(counts.tolist())
        if total > MAX_TOTAL_COUNT:
            raise InvalidArgument(f"Counts sum to {total}, more than {MAX_TOTAL_COUNT}")
        object.__setattr__(self, "counts", _frozen(counts))
        object.__setattr__(self, "n", total)

        if self.indices is None:
            if counts.size == 0:
                raise InvalidArgument("Counts need at least one bin")
            if counts.size > SPARSE_THRESHOLD:
                raise InvalidArgument(
                    f"Supports larger than {SPARSE_THRESHOLD} bins must use the sparse form"
                )
            object.__setattr__(self, "support_size", counts.size)
            object.__setattr__(self, "labels", _as_labels(self.labels, counts.size))
            return

        if self.support_size < 1:
            raise InvalidArgument("Sparse counts need a positive support size")
        indices = np.asarray(self.indices, dtype=np.int64).ravel()
        if indices.size != counts.size:
            raise InvalidArgument("Sparse counts need one index per count")
        if np.any(counts == 0):
            raise InvalidArgument("Sparse entries must be strictly positive")
        if indices.size and (indices.min() < 1 or indices.max() > self.support_size):
            raise InvalidArgument(f"Bin indices must lie in 1..{self.support_size}")
        order = np.argsort(indices, kind="stable")
        indices, counts = indices[order], counts[order]
        if np.any(np.diff(indices) == 0):
            raise InvalidArgument("Sparse bin indices must be unique")
        object.__setattr__(self, "indices", _frozen(indices))
        object.__setattr__(self, "counts", _frozen(counts))

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def dense(cls, counts, labels=None) -> "EmpiricalCounts":
        return cls(np.asarray(counts), labels)

    @classmethod
    def sparse(cls, entries: Mapping[int, int], support_size: int) -> "EmpiricalCounts":
        keys = np.fromiter(entries.keys(), dtype=np.int64, count=len(entries))
        values = np.fromiter(entries.values(), dtype=np.int64, count=len(entries))
        return cls(values, indices=keys, support_size=support_size)

    @classmethod
    def from_draws(cls, draws, support_size: int) -> "EmpiricalCounts":
        """Sparse counts of 1-based draws from a support of `support_size` bins."""
        draws = np.asarray(draws, dtype=np.int64).ravel()
        indices, counts = np.unique(draws, return_counts=True)
        return cls(counts, indices=indices, support_size=support_size)

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------
    @property
    def is_sparse(self) -> bool:
        return self.indices is not None

    @property
    def num_bins(self) -> int:
        return self.support_size

    @property
    def occupied(self) -> int:
        return int(np.count_nonzero(self.counts))

    def exact_proportions(self) -> Tuple[Fraction, ...]:
        """count/n per stored entry, in rational arithmetic."""
        if self.n == 0:
            raise InvalidArgument("Proportions need at least one draw")
        return tuple(Fraction(int(c), self.n) for c in self.counts)

    def permuted(self, perm: Sequence[int]) -> "EmpiricalCounts":
        if self.is_sparse:
            raise InvalidArgument("Sparse counts cannot be permuted")
        perm = np.asarray(perm, dtype=np.int64)
        labels = None if self.labels is None else [self.labels[i] for i in perm]
        return EmpiricalCounts(self.counts[perm], labels)


# ============================================================================
# OPERATIONS
# ============================================================================

def make_uniform(m: int, labels=None) -> BinDistribution:
    """Uniform distribution over m bins."""
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise InvalidArgument(f"Uniform model needs m >= 1, got {m!r}")
    m = int(m)
    return BinDistribution(np.full(m, 1.0 / m), labels)


def proportions(counts: EmpiricalCounts) -> BinDistribution:
    """Empirical distribution count/n (sparse counts give a sparse distribution)."""
    if counts.n == 0:
        raise InvalidArgument("Proportions need at least one draw (n = 0)")
    probs = counts.counts / counts.n
    if counts.is_sparse:
        return BinDistribution(probs, indices=counts.indices, support_size=counts.support_size)
    return BinDistribution(probs, counts.labels)
