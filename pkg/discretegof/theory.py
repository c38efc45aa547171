"""
Empirical checks of the asymptotic behaviour of the KS and Euclidean statistics.

Each check simulates, compares the Monte-Carlo estimate with a target value
and returns a TheoryEstimate carrying a pass/fail verdict:

    bridge         E max_k |S_k| / sqrt(m) for a shuffled sequence of m/2 (+1)s
                   and m/2 (-1)s; tends to sqrt(pi/2) ln 2
    null-euclid    E U^2 = (1 - sum p0^2) / n for the Euclidean distance U
    null-ks        E V sqrt(n) for the KS statistic V under the identity order
    power          KS distance of a uniform model perturbed by +-c
    sparse-limit   how often the sparse Euclidean distance differs from its
                   collision-free value sqrt(1/n - 1/M)

For m up to EXACT_BRIDGE_LIMIT the bridge and power targets are exact
finite-m means obtained by counting lattice paths.
"""
import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from .config import (
    BRIDGE_CONSTANT,
    BRIDGE_RELATIVE_TOL,
    NULL_KS_ABS_TOL,
    POWER_MEAN_RELATIVE_TOL,
    SIGMA_BAND,
    SPARSE_LIMIT_DEVIATION,
    SPARSE_LIMIT_MAX_RATIO,
)
from .engine.rng import StreamTag, check_seed, stream
from .engine.sampling import uniform_draws
from .errors import InvalidArgument
from .models.distribution import BinDistribution
from .stats.dense import euclidean_values, ks_values
from .stats.kinds import Ordering
from .stats.sparse import sparse_euclidean_value
from .stats.summation import canonical_sum

logger = logging.getLogger(__name__)

EXACT_BRIDGE_LIMIT = 200
CHUNK_CELLS = 2**22  # rows * bins simulated per theory chunk

_CLAIM_CODES = {"bridge": 1, "null-euclid": 2, "null-ks": 3, "power": 4, "sparse-limit": 5}


@dataclass(frozen=True)
class TheoryEstimate:
    claim: str
    m: Optional[int]
    n: Optional[int]
    trials: int
    estimate: float
    target: float
    stderr: float
    tolerance: float
    passed: bool

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class BridgeEstimate(TheoryEstimate):
    """Bridge-constant estimate; stderr is the sample sd over sqrt(trials)."""

    def __post_init__(self):
        if not self.estimate > 0:
            raise InvalidArgument("Bridge estimate must be positive")


# ============================================================================
# HELPERS
# ============================================================================

def _positive(name: str, value) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise InvalidArgument(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _even(m) -> int:
    m = _positive("m", m)
    if m % 2:
        raise InvalidArgument(f"m must be even, got {m}")
    return m


def _theory_stream(seed: int, claim: str, chunk: int) -> np.random.Generator:
    return stream(seed, StreamTag.THEORY, (_CLAIM_CODES[claim] << 40) + chunk)


def _chunks(trials: int, width: int):
    rows = max(1, CHUNK_CELLS // max(1, width))
    for chunk, start in enumerate(range(0, trials, rows)):
        yield chunk, min(rows, trials - start)


def _mean_and_stderr(values: np.ndarray) -> Tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def _verdict(estimate: float, target: float, tolerance: float) -> bool:
    return abs(estimate - target) <= tolerance


def _sigma_tolerance(stderr: float) -> float:
    return max(SIGMA_BAND * stderr, 1e-12)


@lru_cache(maxsize=64)
def exact_bridge_mean(m: int) -> Fraction:
    """
    Exact E max_k |S_k| over all C(m, m/2) arrangements of m/2 (+1)s and
    m/2 (-1)s: the sum over h >= 1 of P(max |S| >= h).
    """
    m = _even(m)
    if m > EXACT_BRIDGE_LIMIT:
        raise InvalidArgument(f"Exact bridge means are available up to m = {EXACT_BRIDGE_LIMIT}")
    total = math.comb(m, m // 2)
    expected = Fraction(0)
    for h in range(1, m // 2 + 1):
        # walks of m steps from 0 back to 0 that never leave [-(h-1), h-1]
        width = 2 * h - 1
        paths = np.zeros(width, dtype=object)
        paths[h - 1] = 1
        for _ in range(m):
            stepped = np.zeros(width, dtype=object)
            stepped[1:] += paths[:-1]
            stepped[:-1] += paths[1:]
            paths = stepped
        expected += Fraction(total - int(paths[h - 1]), total)
    return expected


def _bridge_maxima(m: int, trials: int, seed: int, claim: str) -> np.ndarray:
    """max_k |S_k| for `trials` shuffled +-1 sequences of length m."""
    signs = np.repeat(np.array([1, -1], dtype=np.int8), m // 2)
    maxima = np.empty(trials, dtype=np.int64)
    filled = 0
    for chunk, rows in _chunks(trials, m):
        shuffled = _theory_stream(seed, claim, chunk).permuted(np.tile(signs, (rows, 1)), axis=1)
        walks = np.cumsum(shuffled, axis=1, dtype=np.int32)
        maxima[filled:filled + rows] = np.abs(walks).max(axis=1)
        filled += rows
    return maxima


# ============================================================================
# BRIDGE CONSTANT
# ============================================================================

def verify_bridge_constant(m: int, trials: int, seed: int = 0) -> BridgeEstimate:
    m = _even(m)
    trials = _positive("trials", trials)
    seed = check_seed(seed)
    logger.info("Bridge check: m=%d trials=%d seed=%d", m, trials, seed)

    estimate, error = _mean_and_stderr(_bridge_maxima(m, trials, seed, "bridge") / math.sqrt(m))
    if m <= EXACT_BRIDGE_LIMIT:
        target = float(exact_bridge_mean(m)) / math.sqrt(m)
        tolerance = _sigma_tolerance(error)
    else:
        target = BRIDGE_CONSTANT
        tolerance = BRIDGE_RELATIVE_TOL * BRIDGE_CONSTANT
    return BridgeEstimate("bridge", m, None, trials, estimate, target, error, tolerance,
                          _verdict(estimate, target, tolerance))


# ============================================================================
# NULL EXPECTATIONS
# ============================================================================

def _null_rows(model: BinDistribution, n: int, trials: int, seed: int, claim: str):
    if model.is_sparse:
        raise InvalidArgument("Null expectations need a dense model")
    for chunk, rows in _chunks(trials, model.num_bins):
        counts = _theory_stream(seed, claim, chunk).multinomial(n, model.probs, size=rows)
        yield counts / n - model.probs


def null_expectation_euclid(model: BinDistribution, n: int, trials: int, seed: int = 0) -> TheoryEstimate:
    """Mean of U^2 against the exact multinomial value (1 - sum p0^2)/n."""
    n = _positive("n", n)
    trials = _positive("trials", trials)
    seed = check_seed(seed)
    squares = np.concatenate([canonical_sum(diff * diff)
                              for diff in _null_rows(model, n, trials, seed, "null-euclid")])
    estimate, error = _mean_and_stderr(squares)
    target = (1.0 - math.fsum(model.probs * model.probs)) / n
    tolerance = _sigma_tolerance(error)
    return TheoryEstimate("null-euclid", model.num_bins, n, trials, estimate, target, error,
                          tolerance, _verdict(estimate, target, tolerance))


def null_expectation_ks(model: BinDistribution, n: int, trials: int, seed: int = 0,
                        ordering: Optional[Ordering] = None) -> TheoryEstimate:
    """Mean of V sqrt(n); the target is the large-m, large-n limit."""
    n = _positive("n", n)
    trials = _positive("trials", trials)
    seed = check_seed(seed)
    perm = None if ordering is None else ordering.perm
    values = np.concatenate([ks_values(diff, perm)
                             for diff in _null_rows(model, n, trials, seed, "null-ks")])
    estimate, error = _mean_and_stderr(values * math.sqrt(n))
    return TheoryEstimate("null-ks", model.num_bins, n, trials, estimate, BRIDGE_CONSTANT, error,
                          NULL_KS_ABS_TOL, _verdict(estimate, BRIDGE_CONSTANT, NULL_KS_ABS_TOL))


# ============================================================================
# POWER ANALYSIS
# ============================================================================

@dataclass(frozen=True, eq=False)
class PowerScenario:
    """
    Uniform model over m bins against the alternative 1/m + c * signs[j],
    with m/2 signs of each kind. Signs are integers, so the perturbations
    sum to zero exactly.
    """
    m: int
    c: float
    signs: np.ndarray

    def __post_init__(self):
        m = _even(self.m)
        c = float(self.c)
        if not (math.isfinite(c) and c > 0):
            raise InvalidArgument(f"c must be a positive real, got {self.c!r}")
        if m * c > 2:
            raise InvalidArgument(f"m * c must not exceed 2, got {m * c!r}")
        if c > 1.0 / m:
            raise InvalidArgument(f"c must not exceed 1/m = {1.0 / m!r} (probabilities would be negative)")
        signs = np.array(self.signs, dtype=np.int64).ravel()
        if signs.size != m or not np.all(np.abs(signs) == 1) or signs.sum() != 0:
            raise InvalidArgument("signs must hold m/2 entries +1 and m/2 entries -1")
        signs.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def sorted(cls, m: int, c: float) -> "PowerScenario":
        return cls(m, c, np.repeat([1, -1], _even(m) // 2))

    @classmethod
    def alternating(cls, m: int, c: float) -> "PowerScenario":
        return cls(m, c, np.tile([1, -1], _even(m) // 2))

    @property
    def base(self) -> BinDistribution:
        return BinDistribution(np.full(self.m, 1.0 / self.m))

    @property
    def alternative(self) -> BinDistribution:
        return BinDistribution(1.0 / self.m + self.c * self.signs)


def power_scenario_stats(scenario: PowerScenario, ordering: Optional[Ordering] = None) -> Tuple[float, float]:
    """(u, v): Euclidean and KS distances between the alternative and the base."""
    perm = None
    if ordering is not None:
        if ordering.size != scenario.m:
            raise InvalidArgument(f"Ordering covers {ordering.size} bins, scenario has {scenario.m}")
        perm = ordering.perm
    diff = scenario.alternative.probs - scenario.base.probs
    return float(euclidean_values(diff)), float(ks_values(diff, perm))


def power_scenario_mean_ks(m: int, c: float, trials: int, seed: int = 0) -> TheoryEstimate:
    """Mean KS distance v over uniformly random orderings of the signs."""
    scenario = PowerScenario.sorted(m, c)
    trials = _positive("trials", trials)
    seed = check_seed(seed)
    m = scenario.m
    estimate, error = _mean_and_stderr(_bridge_maxima(m, trials, seed, "power") * scenario.c)
    if m <= EXACT_BRIDGE_LIMIT:
        target = float(exact_bridge_mean(m)) * scenario.c
        tolerance = _sigma_tolerance(error)
    else:
        target = math.sqrt(m) * BRIDGE_CONSTANT * scenario.c
        tolerance = POWER_MEAN_RELATIVE_TOL * target
    return TheoryEstimate("power", m, None, trials, estimate, target, error, tolerance,
                          _verdict(estimate, target, tolerance))


# ============================================================================
# SPARSE LIMIT
# ============================================================================

def collision_probability(n: int, support_size: int) -> float:
    """Probability that n uniform draws from support_size bins share a bin."""
    if n > support_size:
        return 1.0
    steps = np.arange(n, dtype=np.float64) / support_size
    return float(-np.expm1(np.sum(np.log1p(-steps))))


def sparse_limit_check(n: int, support_size: int, trials: int, seed: int = 0,
                       max_ratio: float = SPARSE_LIMIT_MAX_RATIO,
                       deviation: float = SPARSE_LIMIT_DEVIATION) -> TheoryEstimate:
    """
    Fraction of trials whose sparse Euclidean distance departs from the
    collision-free value. The relative threshold is capped at 1/(2n) since a
    single collision moves the distance by a relative 1/n.
    """
    n = _positive("n", n)
    support_size = _positive("M", support_size)
    trials = _positive("trials", trials)
    seed = check_seed(seed)
    if n / support_size > max_ratio:
        raise InvalidArgument(f"n/M = {n / support_size:.3g} exceeds the allowed ratio {max_ratio:g}")

    logger.info("Sparse-limit check: n=%d M=%d trials=%d seed=%d", n, support_size, trials, seed)
    reference = math.sqrt(1.0 / n - 1.0 / support_size)
    threshold = min(deviation, 0.5 / n)
    deviating = 0
    for trial in range(trials):
        draws = uniform_draws(support_size, n, _theory_stream(seed, "sparse-limit", trial))
        indices, counts = np.unique(draws, return_counts=True)
        value = sparse_euclidean_value(indices, counts, n, support_size)
        if reference == 0.0:
            deviating += value != 0.0
        else:
            deviating += abs(value - reference) / reference > threshold

    estimate = deviating / trials
    target = collision_probability(n, support_size)
    error = math.sqrt(target * (1.0 - target) / trials)
    tolerance = _sigma_tolerance(error)
    return TheoryEstimate("sparse-limit", support_size, n, trials, estimate, target, error,
                          tolerance, _verdict(estimate, target, tolerance))
