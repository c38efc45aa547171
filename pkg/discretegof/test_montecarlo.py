"""
Tests for Monte-Carlo sampling and P-values.

The published P-values come from 4,000,000 simulations; default runs use
40,000 and compare within about five combined standard errors. Runs at
400,000 simulations are marked slow.
"""
import math

import numpy as np
import pytest

from discretegof.engine import (
    PValueReport,
    StreamTag,
    TestSpec,
    pvalue,
    pvalue_sparse,
    sample_counts,
    sample_sparse_uniform,
    simulation_stream,
    stderr,
    stream,
)
from discretegof.errors import InvalidArgument, UnsupportedModel, UnsupportedStatistic
from discretegof.files.readers import align_counts, read_counts
from discretegof.models import (
    BinDistribution,
    EmpiricalCounts,
    FixedFamily,
    HardyWeinbergFamily,
    ParametricFamily,
    SparseUniformModel,
    make_uniform,
    poisson_model,
)
from discretegof.stats import Ordering, StatisticKind

ALL_BUT_L1 = ("ks", "euclidean", "chi2", "g2", "freeman_tukey")


def by_kind(reports):
    return {report.statistic.value: report for report in reports}


def candy_spec(simulations, statistics=("euclidean", "chi2", "g2", "freeman_tukey"), seed=1, model=None):
    return TestSpec(
        data=read_counts("candy.csv"),
        model=model if model is not None else make_uniform(5),
        statistics=statistics,
        simulations=simulations,
        seed=seed,
    )


def poisson_spec(simulations, seed=1):
    model = poisson_model(100).distribution
    data = align_counts(read_counts("poisson_observed.csv"), model)
    return TestSpec(data=data, model=model, statistics=ALL_BUT_L1, simulations=simulations, seed=seed)


def rhesus_spec(simulations, seed=1):
    family = HardyWeinbergFamily()
    data = align_counts(read_counts("rhesus.csv"), family)
    return TestSpec(data=data, model=family, statistics=("euclidean", "chi2", "g2", "freeman_tukey"),
                    ordering=Ordering.lexicographic(45), simulations=simulations, seed=seed)


# ============================================================================
# STANDARD ERROR
# ============================================================================

def test_stderr_values():
    assert stderr(0.5, 4_000_000) == pytest.approx(0.00025, rel=1e-12)
    assert stderr(0.0, 100) == 0.0
    assert stderr(1.0, 100) == 0.0
    assert stderr(0.0075, 4_000_000) == pytest.approx(4.31e-5, rel=2e-3)


def test_stderr_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        stderr(1.5, 10)
    with pytest.raises(InvalidArgument):
        stderr(0.5, 0)


# ============================================================================
# SAMPLING
# ============================================================================

def test_sample_point_mass():
    model = BinDistribution([0.0, 0.0, 1.0, 0.0])
    counts = sample_counts(model, 7, stream(3, StreamTag.DATA, 0))
    assert counts.counts.tolist() == [0, 0, 7, 0]


def test_sample_counts_concentrate():
    counts = sample_counts(make_uniform(2), 10**6, stream(4, StreamTag.DATA, 0))
    assert counts.n == 10**6
    assert abs(counts.counts[0] - 500_000) <= 5 * math.sqrt(10**6 * 0.25)


def test_sample_counts_mean():
    """Mean count of the first bin of (0.3, 0.7) with n = 10 is 3."""
    model = BinDistribution([0.3, 0.7])
    trials = 20_000
    firsts = [sample_counts(model, 10, stream(5, StreamTag.DATA, i)).counts[0] for i in range(trials)]
    error = math.sqrt(10 * 0.3 * 0.7 / trials)
    assert abs(np.mean(firsts) - 3.0) <= 5 * error


def test_sample_sparse_uniform():
    data = sample_sparse_uniform(SparseUniformModel(2**32), 1000, stream(6, StreamTag.DATA, 0))
    assert data.is_sparse
    assert data.n == 1000
    assert data.indices.min() >= 1 and data.indices.max() <= 2**32


def test_simulation_streams_are_reproducible():
    first = simulation_stream(9, 17).random(4)
    again = simulation_stream(9, 17).random(4)
    other = simulation_stream(9, 18).random(4)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


# ============================================================================
# TEST SPEC VALIDATION
# ============================================================================

def test_zero_simulations_rejected():
    with pytest.raises(InvalidArgument):
        candy_spec(0)


def test_dimension_mismatch_rejected():
    with pytest.raises(InvalidArgument):
        TestSpec(data=read_counts("candy.csv"), model=make_uniform(4), statistics=("ks",))


def test_family_without_mle_is_unsupported():
    spec = TestSpec(data=EmpiricalCounts.dense([3, 4]), model=ParametricFamily(2),
                    statistics=("euclidean",), simulations=10)
    with pytest.raises(UnsupportedModel):
        pvalue(spec)


# ============================================================================
# P-VALUES
# ============================================================================

def test_exact_fit_has_pvalue_one():
    spec = TestSpec(data=EmpiricalCounts.dense([5, 5]), model=make_uniform(2),
                    statistics=list(StatisticKind), simulations=500, seed=2)
    for report in pvalue(spec):
        assert report.observed == 0.0
        assert report.p_value == 1.0
        assert report.hits == 500
        assert report.std_error == 0.0


def test_report_fields():
    reports = pvalue(candy_spec(1000, statistics=("ks", "euclidean")))
    assert [r.statistic for r in reports] == [StatisticKind.KS, StatisticKind.EUCLIDEAN]
    for report in reports:
        assert isinstance(report, PValueReport)
        assert report.p_value == report.hits / report.simulations
        assert 0 <= report.hits <= 1000
        assert report.std_error == stderr(report.p_value, 1000)
        record = report.to_dict()
        assert list(record)[:8] == ["statistic", "observed", "p_value", "std_error",
                                    "simulations", "hits", "seed", "rng_id"]
    assert reports[0].ordering == "identity"
    assert reports[1].ordering is None


def test_deterministic_across_worker_counts():
    """Same spec and seed give identical reports on 1, 4 and 16 workers."""
    spec = candy_spec(10_000, statistics=("ks", "euclidean", "g2"), seed=7)
    serial = pvalue(spec, workers=1)
    assert pvalue(spec, workers=4) == serial
    assert pvalue(spec, workers=16) == serial


def test_fixed_family_matches_fixed_model():
    """A degenerate family reproduces the fixed-model path bit for bit."""
    kinds = ("ks", "euclidean", "chi2", "g2", "freeman_tukey", "l1")
    fixed = pvalue(candy_spec(3000, statistics=kinds, seed=3))
    family = pvalue(candy_spec(3000, statistics=kinds, seed=3, model=FixedFamily(make_uniform(5))))
    assert family == fixed


def test_euclidean_and_chi2_share_hits_under_uniform():
    reports = by_kind(pvalue(candy_spec(20_000, statistics=("euclidean", "chi2"), seed=11)))
    assert reports["euclidean"].hits == reports["chi2"].hits


def test_different_seeds_differ():
    first = pvalue(candy_spec(2000, statistics=("euclidean",), seed=1))[0]
    second = pvalue(candy_spec(2000, statistics=("euclidean",), seed=2))[0]
    assert first.hits != second.hits


def test_poisson_pvalues():
    """One draw at each of 100..109 against Poisson(100)."""
    reports = by_kind(pvalue(poisson_spec(40_000)))
    assert reports["ks"].p_value == pytest.approx(0.0075, abs=0.003)
    assert reports["euclidean"].p_value == pytest.approx(0.998, abs=0.002)
    assert reports["chi2"].p_value == pytest.approx(0.999, abs=0.002)
    assert reports["g2"].p_value == pytest.approx(0.999, abs=0.002)
    assert reports["freeman_tukey"].p_value == pytest.approx(0.998, abs=0.002)


def test_candy_pvalues():
    reports = by_kind(pvalue(candy_spec(40_000)))
    assert reports["euclidean"].p_value == pytest.approx(0.770, abs=0.012)
    assert reports["chi2"].hits == reports["euclidean"].hits
    assert reports["g2"].p_value == pytest.approx(0.766, abs=0.012)
    assert reports["freeman_tukey"].p_value == pytest.approx(0.755, abs=0.012)


def test_hardy_weinberg_pvalues():
    """Rhesus pair counts with per-simulation re-estimation of theta."""
    reports = by_kind(pvalue(rhesus_spec(40_000)))
    assert reports["euclidean"].p_value == pytest.approx(0.039, abs=0.006)
    assert reports["chi2"].p_value == pytest.approx(0.693, abs=0.014)
    assert reports["g2"].p_value == pytest.approx(0.600, abs=0.015)
    assert reports["freeman_tukey"].p_value == pytest.approx(0.562, abs=0.015)


def test_null_pvalues_are_calibrated():
    """Data drawn from the model: about 10% of P-values fall at or below 0.1."""
    model = make_uniform(10)
    runs = 200
    small = 0
    for run in range(runs):
        data = sample_counts(model, 100, stream(run, StreamTag.DATA, 0))
        spec = TestSpec(data=data, model=model, statistics=("euclidean",), simulations=1000, seed=run)
        small += pvalue(spec)[0].p_value <= 0.1
    assert abs(small / runs - 0.1) <= 0.07


# ============================================================================
# SPARSE P-VALUES
# ============================================================================

def test_sequential_draws_fail_ks_but_pass_euclidean():
    """Draws 1..1000 from 2**32 bins look perfect to the Euclidean distance."""
    M = 2**32
    data = EmpiricalCounts.from_draws(np.arange(1, 1001), M)
    reports = by_kind(pvalue_sparse(data, SparseUniformModel(M), ("ks", "euclidean"), 10_000, seed=0))
    assert reports["ks"].hits == 0
    assert reports["ks"].p_value == 0.0
    assert reports["euclidean"].p_value >= 0.999


def test_single_draw_sparse_pvalue_is_one():
    M = 2**32
    data = EmpiricalCounts.sparse({123456: 1}, M)
    report = pvalue_sparse(data, SparseUniformModel(M), ("euclidean",), 200, seed=4)[0]
    assert report.p_value == 1.0


def test_sparse_rejects_other_statistics():
    data = EmpiricalCounts.sparse({1: 1}, 10)
    with pytest.raises(UnsupportedStatistic):
        pvalue_sparse(data, SparseUniformModel(10), ("chi2",), 10)


def test_sparse_deterministic_across_workers():
    M = 10**9
    data = sample_sparse_uniform(SparseUniformModel(M), 200, stream(8, StreamTag.DATA, 0))
    serial = pvalue_sparse(data, SparseUniformModel(M), ("ks", "euclidean"), 5000, seed=5, workers=1)
    assert pvalue_sparse(data, SparseUniformModel(M), ("ks", "euclidean"), 5000, seed=5, workers=3) == serial


def test_uniform_sample_ks_pvalue_not_tiny():
    """Draws from the package's own generator pass the KS test."""
    M = 2**32
    for run in range(5):
        data = sample_sparse_uniform(SparseUniformModel(M), 500, stream(run, StreamTag.DATA, 3))
        report = pvalue_sparse(data, SparseUniformModel(M), ("ks",), 1000, seed=run)[0]
        assert 0.001 < report.p_value <= 1.0


# ============================================================================
# FULL-SCALE RUNS
# ============================================================================

@pytest.mark.slow
def test_poisson_pvalues_full():
    reports = by_kind(pvalue(poisson_spec(400_000, seed=12), workers=4))
    assert reports["ks"].p_value == pytest.approx(0.0075, abs=0.001)
    assert reports["euclidean"].p_value == pytest.approx(0.998, abs=0.001)
    assert reports["chi2"].p_value == pytest.approx(0.999, abs=0.001)
    assert reports["g2"].p_value == pytest.approx(0.999, abs=0.001)
    assert reports["freeman_tukey"].p_value == pytest.approx(0.998, abs=0.001)


@pytest.mark.slow
def test_candy_pvalues_full():
    reports = by_kind(pvalue(candy_spec(400_000, seed=12), workers=4))
    assert reports["euclidean"].p_value == pytest.approx(0.770, abs=0.003)
    assert reports["chi2"].hits == reports["euclidean"].hits
    assert reports["g2"].p_value == pytest.approx(0.766, abs=0.003)
    assert reports["freeman_tukey"].p_value == pytest.approx(0.755, abs=0.003)


@pytest.mark.slow
def test_hardy_weinberg_pvalues_reference():
    """A 40,000 run agrees with a 400,000 reference within five standard errors."""
    short = by_kind(pvalue(rhesus_spec(40_000, seed=21), workers=4))
    reference = by_kind(pvalue(rhesus_spec(400_000, seed=22), workers=4))
    for kind, report in short.items():
        p_star = reference[kind].p_value
        assert abs(report.p_value - p_star) <= 5 * math.sqrt(p_star * (1 - p_star) / 40_000) + 1e-9
