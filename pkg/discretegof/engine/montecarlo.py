"""
Monte-Carlo P-values.

The P-value of a statistic is the probability, under the fitted model, that a
fresh experiment of n i.i.d. draws is at least as discrepant as the observed
data. Each simulation i draws counts from p0(theta_hat), re-fits the model to
the simulated counts when it is parametric, and scores every requested
statistic on that same experiment. Simulation i always uses random stream i,
and hit counts from chunks are summed, so results do not depend on how many
workers run the chunks.
"""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import CHUNK_SIZE, DEFAULT_SEED, DEFAULT_SIMULATIONS, TIE_RELATIVE_SLACK
from ..errors import InvalidArgument, NumericalFailure, UnsupportedStatistic
from ..models.distribution import BinDistribution, EmpiricalCounts
from ..models.parametric import ParametricFamily
from ..models.sparse import SparseUniformModel
from ..stats.dense import statistic_values
from ..stats.kinds import Ordering, StatisticKind
from ..stats.sparse import sparse_euclidean_value, sparse_ks_value, _check_sparse
from .rng import RNG_ID, check_seed, simulation_stream
from .sampling import multinomial_counts, uniform_draws

logger = logging.getLogger(__name__)

Model = Union[BinDistribution, ParametricFamily]

SPARSE_KINDS = (StatisticKind.KS, StatisticKind.EUCLIDEAN)


# ============================================================================
# TYPES
# ============================================================================

@dataclass(frozen=True, eq=False)
class TestSpec:
    """Everything that determines a P-value run."""
    __test__ = False  # not a pytest class

    data: EmpiricalCounts
    model: Model
    statistics: Tuple[StatisticKind, ...]
    ordering: Optional[Ordering] = None
    simulations: int = DEFAULT_SIMULATIONS
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        kinds = tuple(StatisticKind.parse(k) if isinstance(k, str) else StatisticKind(k)
                      for k in self.statistics)
        if not kinds:
            raise InvalidArgument("At least one statistic is required")
        object.__setattr__(self, "statistics", tuple(dict.fromkeys(kinds)))
        check_simulations(self.simulations)
        object.__setattr__(self, "seed", check_seed(self.seed))

        if self.data.is_sparse:
            raise InvalidArgument("Sparse data goes through pvalue_sparse")
        if self.data.n == 0:
            raise InvalidArgument("Data must contain at least one draw (n = 0)")
        if self.model.num_bins != self.data.num_bins:
            raise InvalidArgument(
                f"Dimension mismatch: data has {self.data.num_bins} bins, "
                f"model has {self.model.num_bins}"
            )
        if self.ordering is None:
            object.__setattr__(self, "ordering", Ordering.identity(self.data.num_bins))
        elif self.ordering.size != self.data.num_bins:
            raise InvalidArgument(
                f"Ordering covers {self.ordering.size} bins, data has {self.data.num_bins}"
            )

    @property
    def is_parametric(self) -> bool:
        return isinstance(self.model, ParametricFamily)

    def fitted_model(self) -> BinDistribution:
        """p0(theta_hat) for the observed data (the model itself if fixed)."""
        if self.is_parametric:
            return self.model.fitted_distribution(self.data)
        return self.model


@dataclass(frozen=True)
class PValueReport:
    statistic: StatisticKind
    observed: float
    p_value: float
    std_error: float
    simulations: int
    hits: int
    seed: int
    rng_id: str = RNG_ID
    ordering: Optional[str] = None

    def to_dict(self) -> Dict:
        record = {
            "statistic": self.statistic.value,
            "observed": self.observed,
            "p_value": self.p_value,
            "std_error": self.std_error,
            "simulations": self.simulations,
            "hits": self.hits,
            "seed": self.seed,
            "rng_id": self.rng_id,
        }
        if self.ordering is not None:
            record["ordering"] = self.ordering
        return record


# ============================================================================
# HELPERS
# ============================================================================

def check_simulations(simulations) -> int:
    if isinstance(simulations, bool) or int(simulations) != simulations or simulations < 1:
        raise InvalidArgument(f"Number of simulations must be at least 1, got {simulations!r}")
    return int(simulations)


def stderr(p_hat: float, simulations: int) -> float:
    """Standard error sqrt(p(1-p)/l) of a Monte-Carlo P-value."""
    if not 0.0 <= p_hat <= 1.0:
        raise InvalidArgument(f"P-value must lie in [0, 1], got {p_hat!r}")
    check_simulations(simulations)
    return math.sqrt(p_hat * (1.0 - p_hat) / simulations)


def _threshold(observed: float) -> float:
    if math.isnan(observed):
        raise NumericalFailure("Observed statistic is NaN")
    return observed * (1.0 - TIE_RELATIVE_SLACK)


def make_report(kind, observed, hits, simulations, seed, ordering=None) -> PValueReport:
    p_hat = hits / simulations
    return PValueReport(
        statistic=kind,
        observed=observed,
        p_value=p_hat,
        std_error=stderr(p_hat, simulations),
        simulations=simulations,
        hits=int(hits),
        seed=seed,
        ordering=ordering,
    )


# ============================================================================
# SIMULATION PLANS (picklable; one `run` per chunk of simulation indices)
# ============================================================================

@dataclass(frozen=True, eq=False)
class _DensePlan:
    n: int
    sampling_probs: np.ndarray
    family: Optional[ParametricFamily]
    columns: Tuple[Tuple[StatisticKind, Optional[np.ndarray]], ...]
    thresholds: Tuple[float, ...]
    seed: int

    def run(self, start: int, stop: int) -> np.ndarray:
        rows = np.empty((stop - start, self.sampling_probs.size), dtype=np.int64)
        for offset, index in enumerate(range(start, stop)):
            rows[offset] = multinomial_counts(self.sampling_probs, self.n, simulation_stream(self.seed, index))
        probs = self.sampling_probs if self.family is None else self.family.fit(rows)

        hits = np.zeros(len(self.columns), dtype=np.int64)
        for column, (kind, perm) in enumerate(self.columns):
            values = statistic_values(kind, rows, self.n, probs, perm)
            hits[column] = np.count_nonzero(values >= self.thresholds[column])
        return hits


@dataclass(frozen=True, eq=False)
class _SparsePlan:
    n: int
    support_size: int
    kinds: Tuple[StatisticKind, ...]
    thresholds: Tuple[float, ...]
    seed: int

    def run(self, start: int, stop: int) -> np.ndarray:
        hits = np.zeros(len(self.kinds), dtype=np.int64)
        for index in range(start, stop):
            draws = uniform_draws(self.support_size, self.n, simulation_stream(self.seed, index))
            indices, counts = np.unique(draws, return_counts=True)
            for column, kind in enumerate(self.kinds):
                value = _sparse_value(kind, indices, counts, self.n, self.support_size)
                hits[column] += value >= self.thresholds[column]
        return hits


def _sparse_value(kind, indices, counts, n, support_size) -> float:
    if kind is StatisticKind.KS:
        return sparse_ks_value(indices, counts, n, support_size)
    return sparse_euclidean_value(indices, counts, n, support_size)


def _run_chunk(plan, bounds: Tuple[int, int]) -> np.ndarray:
    return plan.run(*bounds)


def _execute(plan, simulations: int, workers: int) -> np.ndarray:
    """Run all chunks and add up their hit counts."""
    bounds = [(start, min(start + CHUNK_SIZE, simulations))
              for start in range(0, simulations, CHUNK_SIZE)]
    workers = max(1, min(int(workers or 1), len(bounds)))
    logger.debug("Scheduling %d chunks of up to %d simulations on %d workers",
                 len(bounds), CHUNK_SIZE, workers)
    if workers == 1:
        results = [_run_chunk(plan, b) for b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(partial(_run_chunk, plan), bounds))
    return np.sum(results, axis=0, dtype=np.int64)


# ============================================================================
# OPERATIONS
# ============================================================================

@dataclass(frozen=True)
class SimulationOutcome:
    """Observed values and hit counts for every (statistic, ordering) column."""
    columns: Tuple[Tuple[StatisticKind, Optional[int]], ...]
    observed: Tuple[float, ...]
    hits: Tuple[int, ...]


def simulate(spec: TestSpec, ks_orderings: Optional[Sequence[Ordering]] = None,
             workers: int = 1) -> SimulationOutcome:
    """
    One pass of spec.simulations experiments. KS is scored once per ordering
    in `ks_orderings` (default: spec.ordering) on the same experiments; the
    column entry for KS holds the ordering's position in that list.
    """
    if ks_orderings is None:
        ks_orderings = [spec.ordering]
    for ordering in ks_orderings:
        if ordering.size != spec.data.num_bins:
            raise InvalidArgument(
                f"Ordering covers {ordering.size} bins, data has {spec.data.num_bins}"
            )

    fitted = spec.fitted_model()
    n = spec.data.n

    columns: List[Tuple[StatisticKind, Optional[int]]] = []
    kernel_columns = []
    observed = []
    for kind in spec.statistics:
        if kind is StatisticKind.KS:
            for position, ordering in enumerate(ks_orderings):
                columns.append((kind, position))
                kernel_columns.append((kind, ordering.perm))
        else:
            columns.append((kind, None))
            kernel_columns.append((kind, None))
    for kind, perm in kernel_columns:
        observed.append(float(statistic_values(kind, spec.data.counts, n, fitted.probs, perm)))

    plan = _DensePlan(
        n=n,
        sampling_probs=fitted.probs,
        family=spec.model if spec.is_parametric else None,
        columns=tuple(kernel_columns),
        thresholds=tuple(_threshold(value) for value in observed),
        seed=spec.seed,
    )
    hits = _execute(plan, spec.simulations, workers)
    return SimulationOutcome(tuple(columns), tuple(observed), tuple(int(h) for h in hits))


def pvalue(spec: TestSpec, workers: int = 1) -> List[PValueReport]:
    """One PValueReport per requested statistic, in request order."""
    began = time.perf_counter()
    logger.info("P-value run: statistics=%s simulations=%d seed=%d workers=%d parametric=%s",
                ",".join(k.value for k in spec.statistics), spec.simulations, spec.seed,
                workers, spec.is_parametric)
    outcome = simulate(spec, workers=workers)

    reports = []
    for (kind, _), observed, hits in zip(outcome.columns, outcome.observed, outcome.hits):
        ordering = spec.ordering.describe() if kind is StatisticKind.KS else None
        reports.append(make_report(kind, observed, hits, spec.simulations, spec.seed, ordering))
    logger.info("P-value run finished in %.2fs", time.perf_counter() - began)
    return reports


def pvalue_sparse(
    data: EmpiricalCounts,
    model: SparseUniformModel,
    kinds: Sequence = SPARSE_KINDS,
    simulations: int = DEFAULT_SIMULATIONS,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> List[PValueReport]:
    """P-values against a huge uniform support; only KS and Euclidean apply."""
    kinds = StatisticKind.parse_list(k.value if isinstance(k, StatisticKind) else k for k in kinds)
    unsupported = [k.value for k in kinds if k not in SPARSE_KINDS]
    if unsupported:
        raise UnsupportedStatistic(
            f"Sparse supports only allow ks and euclidean, not {', '.join(unsupported)}"
        )
    if not kinds:
        raise InvalidArgument("At least one statistic is required")
    simulations = check_simulations(simulations)
    seed = check_seed(seed)
    _check_sparse(data, model)

    began = time.perf_counter()
    logger.info("Sparse P-value run: n=%d M=%d simulations=%d seed=%d",
                data.n, model.support_size, simulations, seed)
    observed = [_sparse_value(kind, data.indices, data.counts, data.n, model.support_size)
                for kind in kinds]
    plan = _SparsePlan(
        n=data.n,
        support_size=model.support_size,
        kinds=kinds,
        thresholds=tuple(_threshold(value) for value in observed),
        seed=seed,
    )
    hits = _execute(plan, simulations, workers)
    logger.info("Sparse P-value run finished in %.2fs", time.perf_counter() - began)
    return [
        make_report(kind, value, int(h), simulations, seed,
                    "natural" if kind is StatisticKind.KS else None)
        for kind, value, h in zip(kinds, observed, hits)
    ]
