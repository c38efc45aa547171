"""
Euclidean and KS statistics against a uniform model on bins 1..M, computed
from the occupied bins only.
"""
import numpy as np

from ..errors import InvalidArgument
from ..models.distribution import EmpiricalCounts
from ..models.sparse import SparseUniformModel
from .summation import canonical_sum


def sparse_euclidean_value(indices: np.ndarray, counts: np.ndarray, n: int, support_size: int) -> float:
    q = 1.0 / support_size
    diff = counts / n - q
    empty = (support_size - counts.size) * q * q
    return float(np.sqrt(canonical_sum(np.append(diff * diff, empty))))


def sparse_ks_value(indices: np.ndarray, counts: np.ndarray, n: int, support_size: int) -> float:
    # Between occupied bins the deviation is linear, so its maximum sits at
    # a jump: just before (pre) or just after (post) each occupied bin.
    q = 1.0 / support_size
    position = indices.astype(np.float64)
    cumulative = np.cumsum(counts)
    post = np.abs(cumulative / n - position * q)
    pre = np.abs((cumulative - counts) / n - (position - 1.0) * q)
    return float(max(post.max(), pre.max()))


def _check_sparse(emp: EmpiricalCounts, model: SparseUniformModel):
    if not emp.is_sparse:
        raise InvalidArgument("Sparse statistics need sparse counts")
    if emp.support_size != model.support_size:
        raise InvalidArgument(
            f"Support mismatch: counts over {emp.support_size} bins, model over {model.support_size}"
        )
    if emp.n == 0:
        raise InvalidArgument("Statistics need at least one draw (n = 0)")
    if emp.indices.size and (emp.indices[0] < 1 or emp.indices[-1] > model.support_size):
        raise InvalidArgument(f"Occupied bins must lie in 1..{model.support_size}")


def sparse_euclidean(emp: EmpiricalCounts, model: SparseUniformModel) -> float:
    """sqrt(sum over occupied (c/n - q)^2 + (M - occupied) q^2)."""
    _check_sparse(emp, model)
    return sparse_euclidean_value(emp.indices, emp.counts, emp.n, model.support_size)


def sparse_ks(emp: EmpiricalCounts, model: SparseUniformModel) -> float:
    """KS in the natural integer order of the bins."""
    _check_sparse(emp, model)
    return sparse_ks_value(emp.indices, emp.counts, emp.n, model.support_size)
