from .distribution import BinDistribution, EmpiricalCounts, make_uniform, proportions
from .hardy_weinberg import (
    HardyWeinbergFamily,
    HardyWeinbergModel,
    hw_mle,
    hw_probabilities,
    pair_bins,
    pair_labels,
)
from .parametric import FixedFamily, ParametricFamily
from .poisson import TailPolicy, TruncatedPoissonModel, poisson_model
from .sparse import SparseUniformModel

__all__ = [
    "BinDistribution",
    "EmpiricalCounts",
    "FixedFamily",
    "HardyWeinbergFamily",
    "HardyWeinbergModel",
    "ParametricFamily",
    "SparseUniformModel",
    "TailPolicy",
    "TruncatedPoissonModel",
    "hw_mle",
    "hw_probabilities",
    "make_uniform",
    "pair_bins",
    "pair_labels",
    "poisson_model",
    "proportions",
]
