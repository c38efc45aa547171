"""Parametric model families p0(theta) with maximum-likelihood fitting."""

from typing import Optional, Tuple

import numpy as np

from ..errors import InvalidArgument, UnsupportedModel
from .distribution import BinDistribution, EmpiricalCounts


class ParametricFamily:
    """
    A family p0(theta) over a fixed list of bins.

    Subclasses implement `probabilities` and, to be usable for Monte-Carlo
    re-estimation, `estimate`. Both work on stacked rows: counts of shape
    (..., num_bins) give parameters of shape (..., k).
    """
    name = "parametric"

    def __init__(self, num_bins: int, labels: Optional[Tuple[str, ...]] = None):
        self.num_bins = num_bins
        self.labels = labels

    def estimate(self, counts: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.name} has no maximum-likelihood estimator")

    def probabilities(self, params: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def fit(self, counts: np.ndarray) -> np.ndarray:
        """p0(theta_hat(counts)) row by row."""
        try:
            params = self.estimate(counts)
        except NotImplementedError as exc:
            raise UnsupportedModel(str(exc)) from exc
        return self.probabilities(params)

    def fitted_distribution(self, data: EmpiricalCounts) -> BinDistribution:
        if data.is_sparse:
            raise InvalidArgument("Parametric fitting needs dense counts")
        if data.num_bins != self.num_bins:
            raise InvalidArgument(
                f"{self.name} has {self.num_bins} bins, data has {data.num_bins}"
            )
        if data.n == 0:
            raise InvalidArgument("Fitting needs at least one draw (n = 0)")
        return BinDistribution(self.fit(data.counts), self.labels)


class FixedFamily(ParametricFamily):
    """Degenerate family holding a single distribution; theta is empty."""
    name = "fixed"

    def __init__(self, distribution: BinDistribution):
        if distribution.is_sparse:
            raise InvalidArgument("Fixed families need a dense distribution")
        super().__init__(distribution.num_bins, distribution.labels)
        self.distribution = distribution

    def estimate(self, counts: np.ndarray) -> np.ndarray:
        counts = np.asarray(counts)
        return np.empty(counts.shape[:-1] + (0,))

    def probabilities(self, params: np.ndarray) -> np.ndarray:
        params = np.asarray(params)
        return np.broadcast_to(self.distribution.probs, params.shape[:-1] + (self.num_bins,))
