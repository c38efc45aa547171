from .montecarlo import (
    PValueReport,
    SimulationOutcome,
    TestSpec,
    pvalue,
    pvalue_sparse,
    simulate,
    stderr,
)
from .rng import RNG_ID, StreamTag, simulation_stream, stream
from .sampling import sample_counts, sample_sparse_uniform

__all__ = [
    "PValueReport",
    "RNG_ID",
    "SimulationOutcome",
    "StreamTag",
    "TestSpec",
    "pvalue",
    "pvalue_sparse",
    "sample_counts",
    "sample_sparse_uniform",
    "simulate",
    "simulation_stream",
    "stderr",
    "stream",
]
