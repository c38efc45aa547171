"""
Bin orderings for the KS statistic and multi-trial ordering experiments.

Trial 1 uses the experiment's canonical ordering; trials 2, 3, ... use
pseudorandom permutations drawn from the ORDERING stream domain, so changing
the number of trials never changes the simulated experiments.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .config import PERMUTATION_INLINE_LIMIT
from .engine.montecarlo import PValueReport, TestSpec, make_report, simulate
from .engine.rng import StreamTag, check_seed, stream
from .errors import InvalidArgument
from .stats.kinds import Ordering, OrderingKind, StatisticKind

logger = logging.getLogger(__name__)


def pseudorandom_ordering(m: int, seed: int, trial: int) -> Ordering:
    """Uniform random permutation of m bins for (seed, trial)."""
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise InvalidArgument(f"Number of bins must be a positive integer, got {m!r}")
    if isinstance(trial, bool) or int(trial) != trial or trial < 1:
        raise InvalidArgument(f"Trial must be a positive integer, got {trial!r}")
    seed = check_seed(seed)
    perm = stream(seed, StreamTag.ORDERING, int(trial)).permutation(int(m))
    return Ordering(perm, OrderingKind.PSEUDORANDOM, seed=seed, trial=int(trial))


@dataclass(frozen=True, eq=False)
class TrialResult:
    trial: int
    ordering: Ordering
    reports: Tuple[PValueReport, ...]

    @property
    def digest(self) -> str:
        return self.ordering.digest

    def report(self, kind) -> PValueReport:
        kind = StatisticKind(kind)
        for report in self.reports:
            if report.statistic is kind:
                return report
        raise KeyError(kind.value)

    def to_dict(self) -> Dict:
        record = {
            "trial": self.trial,
            "ordering": self.ordering.describe(),
            "digest": self.digest,
        }
        if self.ordering.size <= PERMUTATION_INLINE_LIMIT:
            record["permutation"] = [int(i) for i in self.ordering.perm]
        record["reports"] = [report.to_dict() for report in self.reports]
        return record


def trial_orderings(spec: TestSpec, t_count: int, canonical_first: bool = True) -> List[Ordering]:
    m = spec.data.num_bins
    orderings = []
    for trial in range(1, t_count + 1):
        if trial == 1 and canonical_first:
            orderings.append(spec.ordering)
        else:
            orderings.append(pseudorandom_ordering(m, spec.seed, trial))
    return orderings


def ordering_trials(spec: TestSpec, t_count: int, workers: int = 1,
                    canonical_first: bool = True) -> List[TrialResult]:
    """
    KS P-values under t_count orderings of the bins.

    All trials share one pass of simulated experiments. The ordering-invariant
    statistics are evaluated once and their reports repeated in every trial.
    """
    if isinstance(t_count, bool) or int(t_count) != t_count or t_count < 1:
        raise InvalidArgument(f"Trial count must be at least 1, got {t_count!r}")
    if StatisticKind.KS not in spec.statistics:
        raise InvalidArgument("Ordering trials need ks among the statistics")

    orderings = trial_orderings(spec, int(t_count), canonical_first)
    logger.info("Ordering trials: t=%d m=%d simulations=%d seed=%d",
                t_count, spec.data.num_bins, spec.simulations, spec.seed)
    outcome = simulate(spec, ks_orderings=orderings, workers=workers)

    ks_reports: Dict[int, PValueReport] = {}
    shared: Dict[StatisticKind, PValueReport] = {}
    for (kind, position), observed, hits in zip(outcome.columns, outcome.observed, outcome.hits):
        if kind is StatisticKind.KS:
            ks_reports[position] = make_report(kind, observed, hits, spec.simulations, spec.seed,
                                               orderings[position].describe())
        else:
            shared[kind] = make_report(kind, observed, hits, spec.simulations, spec.seed)

    results = []
    for position, ordering in enumerate(orderings):
        reports = tuple(ks_reports[position] if kind is StatisticKind.KS else shared[kind]
                        for kind in spec.statistics)
        results.append(TrialResult(trial=position + 1, ordering=ordering, reports=reports))
    return results


def ks_pvalue_spread(results: List[TrialResult]) -> Tuple[float, float]:
    """Smallest and largest KS P-value across trials."""
    values = np.array([r.report(StatisticKind.KS).p_value for r in results])
    return float(values.min()), float(values.max())
