"""
Discrepancy statistics between observed counts and a model over m bins.

The `*_values` kernels work on stacked rows (shape (..., m)) so the
Monte-Carlo engine can score a whole chunk of simulated experiments at once;
the public operations wrap them for single EmpiricalCounts/BinDistribution
pairs. Formulas, with phat = counts/n and p0 the model:

    ks             max_k |sum_{j<=k} (phat - p0)|   (bins in the given order)
    euclidean      sqrt(sum (phat - p0)^2)
    chi2           n * sum (phat - p0)^2 / p0
    g2             2n * sum phat * ln(phat / p0)
    freeman_tukey  4n * sum (sqrt(phat) - sqrt(p0))^2
    l1             sum |phat - p0|

A count on a zero-probability bin makes chi2 and g2 +inf.
"""
from typing import Optional

import numpy as np

from ..errors import InvalidArgument
from ..models.distribution import BinDistribution, EmpiricalCounts
from .kinds import Ordering, OrderingKind, StatisticKind
from .summation import canonical_sum


# ============================================================================
# ROW KERNELS
# ============================================================================

def ks_values(diff: np.ndarray, perm: Optional[np.ndarray] = None) -> np.ndarray:
    if perm is not None:
        diff = diff[..., perm]
    return np.abs(np.cumsum(diff, axis=-1)).max(axis=-1)


def euclidean_values(diff: np.ndarray) -> np.ndarray:
    return np.sqrt(canonical_sum(diff * diff))


def l1_values(diff: np.ndarray) -> np.ndarray:
    return canonical_sum(np.abs(diff))


def chi2_values(phat: np.ndarray, probs: np.ndarray, n) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(
            probs > 0,
            (phat - probs) ** 2 / probs,
            np.where(phat > 0, np.inf, 0.0),
        )
    return n * canonical_sum(terms)


def g2_values(phat: np.ndarray, probs: np.ndarray, n) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(
            phat > 0,
            np.where(probs > 0, phat * np.log(phat / probs), np.inf),
            0.0,
        )
    return np.maximum(2.0 * n * canonical_sum(terms), 0.0)


def freeman_tukey_values(phat: np.ndarray, probs: np.ndarray, n) -> np.ndarray:
    root = np.sqrt(phat) - np.sqrt(probs)
    return 4.0 * n * canonical_sum(root * root)


def statistic_values(
    kind: StatisticKind,
    counts: np.ndarray,
    n: int,
    probs: np.ndarray,
    perm: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Evaluate one statistic for every row of `counts` against `probs`."""
    phat = np.asarray(counts) / n
    probs = np.asarray(probs, dtype=np.float64)
    if kind is StatisticKind.KS:
        return ks_values(phat - probs, perm)
    if kind is StatisticKind.EUCLIDEAN:
        return euclidean_values(phat - probs)
    if kind is StatisticKind.L1:
        return l1_values(phat - probs)
    if kind is StatisticKind.CHI2:
        return chi2_values(phat, probs, n)
    if kind is StatisticKind.G2:
        return g2_values(phat, probs, n)
    if kind is StatisticKind.FREEMAN_TUKEY:
        return freeman_tukey_values(phat, probs, n)
    raise InvalidArgument(f"Unknown statistic {kind!r}")


# ============================================================================
# OPERATIONS
# ============================================================================

def _check_pair(emp: EmpiricalCounts, model: BinDistribution):
    if emp.is_sparse or model.is_sparse:
        raise InvalidArgument("Dense statistics need dense counts and a dense model")
    if emp.num_bins != model.num_bins:
        raise InvalidArgument(
            f"Dimension mismatch: counts have {emp.num_bins} bins, model has {model.num_bins}"
        )
    if emp.n == 0:
        raise InvalidArgument("Statistics need at least one draw (n = 0)")


def _evaluate(kind, emp, model, perm=None) -> float:
    _check_pair(emp, model)
    return float(statistic_values(kind, emp.counts, emp.n, model.probs, perm))


def ks_statistic(emp: EmpiricalCounts, model: BinDistribution, ordering: Optional[Ordering] = None) -> float:
    """Maximum absolute cumulative difference with bins taken in `ordering`."""
    _check_pair(emp, model)
    if ordering is None:
        ordering = Ordering.identity(emp.num_bins)
    if ordering.size != emp.num_bins:
        raise InvalidArgument(
            f"Ordering covers {ordering.size} bins, data has {emp.num_bins}"
        )
    return _evaluate(StatisticKind.KS, emp, model, ordering.perm)


def euclidean_statistic(emp: EmpiricalCounts, model: BinDistribution) -> float:
    return _evaluate(StatisticKind.EUCLIDEAN, emp, model)


def chi2_statistic(emp: EmpiricalCounts, model: BinDistribution) -> float:
    return _evaluate(StatisticKind.CHI2, emp, model)


def g2_statistic(emp: EmpiricalCounts, model: BinDistribution) -> float:
    return _evaluate(StatisticKind.G2, emp, model)


def freeman_tukey_statistic(emp: EmpiricalCounts, model: BinDistribution) -> float:
    return _evaluate(StatisticKind.FREEMAN_TUKEY, emp, model)


def l1_statistic(emp: EmpiricalCounts, model: BinDistribution) -> float:
    return _evaluate(StatisticKind.L1, emp, model)


def worst_case_ordering(emp: EmpiricalCounts, model: BinDistribution) -> Ordering:
    """Ordering with differences sorted descending; KS is largest under it."""
    _check_pair(emp, model)
    diff = emp.counts / emp.n - model.probs
    return Ordering(np.argsort(-diff, kind="stable"), OrderingKind.WORST)


def worst_case_ks(emp: EmpiricalCounts, model: BinDistribution) -> float:
    """
    Largest KS value over all orderings. The differences sum to zero, so the
    maximum partial sum (all positive differences first) is half the l1
    distance.
    """
    return l1_statistic(emp, model) / 2.0


def statistic(kind: StatisticKind, emp: EmpiricalCounts, model: BinDistribution,
              ordering: Optional[Ordering] = None) -> float:
    """Dispatch on kind; `ordering` only matters for KS."""
    kind = StatisticKind(kind)
    if kind is StatisticKind.KS:
        return ks_statistic(emp, model, ordering)
    return _evaluate(kind, emp, model)
