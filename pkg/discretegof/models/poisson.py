"""Poisson model truncated to a finite support."""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special, stats

from ..config import POISSON_TAIL_TOL
from ..errors import InvalidArgument
from .distribution import BinDistribution

logger = logging.getLogger(__name__)


class TailPolicy(str, Enum):
    """What happens to the probability mass beyond the truncation index."""
    FOLD = "fold"              # one overflow bin holds the remainder
    RENORMALIZE = "renormalize"


@dataclass(frozen=True, eq=False)
class TruncatedPoissonModel:
    """Poisson(lam) on bins 0..J, plus an overflow bin under the fold policy."""
    lam: float
    J: int
    tail_policy: TailPolicy
    tail_tol: float
    distribution: BinDistribution

    @property
    def overflow_label(self) -> str:
        return f">{self.J}"


def _truncation_index(lam: float, tail_tol: float) -> int:
    """Smallest J with P(X > J) < tail_tol."""
    J = int(stats.poisson.isf(tail_tol, lam))
    while stats.poisson.sf(J, lam) >= tail_tol:
        J += 1
    while J > 0 and stats.poisson.sf(J - 1, lam) < tail_tol:
        J -= 1
    return J


def poisson_log_pmf(j: np.ndarray, lam: float) -> np.ndarray:
    return j * math.log(lam) - special.gammaln(j + 1.0) - lam


def poisson_model(lam, tail_tol=POISSON_TAIL_TOL, tail_policy=TailPolicy.FOLD) -> TruncatedPoissonModel:
    """
    Poisson(lam) truncated at the smallest J whose untruncated tail is below
    tail_tol. Probabilities are evaluated in log space and exponentiated.
    """
    try:
        lam = float(lam)
        tail_tol = float(tail_tol)
    except (TypeError, ValueError):
        raise InvalidArgument("Poisson mean and tail tolerance must be numbers")
    if not math.isfinite(lam) or lam <= 0:
        raise InvalidArgument(f"Poisson mean must be positive and finite, got {lam!r}")
    if not 0 < tail_tol < 1:
        raise InvalidArgument(f"Tail tolerance must lie in (0, 1), got {tail_tol!r}")
    tail_policy = TailPolicy(tail_policy)

    J = _truncation_index(lam, tail_tol)
    support = np.arange(J + 1, dtype=np.float64)
    probs = np.exp(poisson_log_pmf(support, lam))
    labels = [str(j) for j in range(J + 1)]
    retained = math.fsum(probs)
    logger.debug("Poisson(%s): truncation index %d, retained mass %.17g", lam, J, retained)

    if tail_policy is TailPolicy.FOLD:
        probs = np.append(probs, max(0.0, 1.0 - retained))
        labels.append(f">{J}")
    else:
        probs = probs / retained

    return TruncatedPoissonModel(
        lam=lam,
        J=J,
        tail_policy=tail_policy,
        tail_tol=tail_tol,
        distribution=BinDistribution(probs, labels),
    )
