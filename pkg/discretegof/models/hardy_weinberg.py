"""
Hardy-Weinberg model for unordered pairs of haplotypes.

With h haplotypes there are h(h+1)/2 pair bins (j, k), j >= k, kept in the
lexicographic order (1,1), (2,1), (2,2), (3,1), ... Under random mating the
pair (j, k) has probability 2*theta_j*theta_k for j > k and theta_k**2 for
j == k.
"""
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..config import HW_HAPLOTYPES, PROBABILITY_ATOL
from ..errors import InvalidArgument
from .distribution import BinDistribution, EmpiricalCounts
from .parametric import ParametricFamily


def pair_bins(haplotypes: int = HW_HAPLOTYPES) -> List[Tuple[int, int]]:
    """Pair bins (j, k), 1-based, j >= k, in lexicographic order."""
    return [(j, k) for j in range(1, haplotypes + 1) for k in range(1, j + 1)]


def pair_label(j: int, k: int) -> str:
    return f"{j}-{k}"


def pair_labels(haplotypes: int = HW_HAPLOTYPES) -> Tuple[str, ...]:
    return tuple(pair_label(j, k) for j, k in pair_bins(haplotypes))


def _pair_index_arrays(haplotypes: int):
    bins = pair_bins(haplotypes)
    first = np.array([j - 1 for j, _ in bins])
    second = np.array([k - 1 for _, k in bins])
    factor = np.where(first == second, 1.0, 2.0)
    return first, second, factor


def _incidence(haplotypes: int) -> np.ndarray:
    """Haplotype copies contributed by one individual in each pair bin."""
    first, second, _ = _pair_index_arrays(haplotypes)
    incidence = np.zeros((first.size, haplotypes), dtype=np.int64)
    np.add.at(incidence, (np.arange(first.size), first), 1)
    np.add.at(incidence, (np.arange(first.size), second), 1)
    return incidence


def _check_theta(theta, haplotypes: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (haplotypes,):
        raise InvalidArgument(f"theta must have {haplotypes} entries, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)) or np.any(theta < 0):
        raise InvalidArgument("theta entries must be finite and nonnegative")
    total = math.fsum(theta)
    if abs(total - 1.0) > PROBABILITY_ATOL:
        raise InvalidArgument(f"theta sums to {total!r}, not 1 within {PROBABILITY_ATOL}")
    return theta


class HardyWeinbergFamily(ParametricFamily):
    """Hardy-Weinberg law; the MLE of theta is the haplotype proportions."""
    name = "hardy-weinberg"

    def __init__(self, haplotypes: int = HW_HAPLOTYPES):
        self.haplotypes = haplotypes
        super().__init__(haplotypes * (haplotypes + 1) // 2, pair_labels(haplotypes))
        self._first, self._second, self._factor = _pair_index_arrays(haplotypes)
        self._incidence = _incidence(haplotypes)

    def allele_counts(self, counts: np.ndarray) -> np.ndarray:
        """Haplotype copy counts; each row sums to 2n exactly."""
        return np.asarray(counts, dtype=np.int64) @ self._incidence

    def estimate(self, counts: np.ndarray) -> np.ndarray:
        counts = np.asarray(counts, dtype=np.int64)
        totals = counts.sum(axis=-1, keepdims=True)
        return self.allele_counts(counts) / (2.0 * totals)

    def probabilities(self, params: np.ndarray) -> np.ndarray:
        theta = np.asarray(params, dtype=np.float64)
        return theta[..., self._first] * theta[..., self._second] * self._factor


@dataclass(frozen=True, eq=False)
class HardyWeinbergModel:
    """A Hardy-Weinberg distribution at fixed haplotype proportions theta."""
    theta: np.ndarray

    def __post_init__(self):
        theta = _check_theta(self.theta, np.asarray(self.theta).size or HW_HAPLOTYPES)
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def haplotypes(self) -> int:
        return self.theta.size

    @property
    def bins(self) -> List[Tuple[int, int]]:
        return pair_bins(self.haplotypes)

    @property
    def distribution(self) -> BinDistribution:
        family = HardyWeinbergFamily(self.haplotypes)
        return BinDistribution(family.probabilities(self.theta), family.labels)


# ============================================================================
# OPERATIONS
# ============================================================================

def hw_probabilities(theta) -> BinDistribution:
    """The 45 pair-bin probabilities for 9 haplotype proportions."""
    theta = _check_theta(theta, HW_HAPLOTYPES)
    return HardyWeinbergModel(theta).distribution


def hw_mle(counts: EmpiricalCounts) -> np.ndarray:
    """Maximum-likelihood haplotype proportions from pair-bin counts."""
    family = HardyWeinbergFamily()
    if counts.is_sparse or counts.num_bins != family.num_bins:
        raise InvalidArgument(f"Hardy-Weinberg counts need {family.num_bins} dense pair bins")
    if counts.n == 0:
        raise InvalidArgument("Hardy-Weinberg fitting needs at least one individual (n = 0)")
    return family.estimate(counts.counts)
