"""
Plot data as CSV files (no rendering).

Experiments:
    poisson-pmf-observed, poisson-cmf-observed    bundled observations vs Poisson(lam)
    poisson-pmf-simulated, poisson-cmf-simulated  one simulated data set vs Poisson(lam)
    trial-pvalues                                 P-values per trial from a trials file
"""
import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import stats

from ..config import PROBABILITY_ATOL
from ..engine.rng import StreamTag, check_seed, stream
from ..engine.sampling import sample_counts
from ..errors import InvalidArgument
from ..models.poisson import poisson_model
from .readers import align_counts, read_counts
from .reports import format_float, read_json_lines

logger = logging.getLogger(__name__)

EXPERIMENTS = (
    "poisson-pmf-observed",
    "poisson-pmf-simulated",
    "poisson-cmf-observed",
    "poisson-cmf-simulated",
    "trial-pvalues",
)


@dataclass(frozen=True, eq=False)
class PlotSeries:
    kind: str
    x: Sequence
    series: Dict[str, np.ndarray] = field(default_factory=dict)
    x_name: str = "x"

    def __post_init__(self):
        if self.kind not in ("pmf", "cmf", "trial-pvalues"):
            raise InvalidArgument(f"Unknown plot kind {self.kind!r}")
        for name, values in self.series.items():
            if len(values) != len(self.x):
                raise InvalidArgument(f"Series {name!r} has {len(values)} points, x has {len(self.x)}")
            if self.kind == "cmf":
                values = np.asarray(values, dtype=np.float64)
                if np.any(np.diff(values) < 0):
                    raise InvalidArgument(f"Cumulative series {name!r} decreases")
                if abs(values[-1] - 1.0) > PROBABILITY_ATOL:
                    raise InvalidArgument(f"Cumulative series {name!r} ends at {values[-1]!r}, not 1")

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow([self.x_name, *self.series])
        for row, x in enumerate(self.x):
            cells = [self.series[name][row] for name in self.series]
            writer.writerow([x, *(format_float(float(c)) for c in cells)])
        return buffer.getvalue()


def _poisson_series(experiment: str, lam: float, seed: int, data_path) -> PlotSeries:
    model = poisson_model(lam)
    distribution = model.distribution
    x = np.arange(model.J + 1)

    if experiment.endswith("observed"):
        data = align_counts(read_counts(data_path), distribution, source=str(data_path))
        column = "observed"
    else:
        # one simulated experiment of the same size as the bundled data
        size = read_counts(data_path).n
        data = sample_counts(distribution, size, stream(check_seed(seed), StreamTag.DATA, 1))
        column = "simulated"
    counts = data.counts[: x.size]

    if "-pmf-" in experiment:
        return PlotSeries("pmf", x.tolist(), {
            "model": distribution.probs[: x.size],
            column: counts / data.n,
        })
    return PlotSeries("cmf", x.tolist(), {
        "model": stats.poisson.cdf(x, lam),
        column: np.cumsum(data.counts)[: x.size] / data.n,
    })


def _trial_series(trials_path) -> PlotSeries:
    records = read_json_lines(trials_path)
    if not records:
        raise InvalidArgument(f"{trials_path}: no trial records")
    statistics = [report["statistic"] for report in records[0]["reports"]]
    series = {}
    for record in records:
        values = {report["statistic"]: report["p_value"] for report in record["reports"]}
        series[f"trial_{record['trial']}"] = np.array([values[s] for s in statistics])
    return PlotSeries("trial-pvalues", statistics, series, x_name="statistic")


def emit_plot(experiment: str, output=None, *, lam: float = 100.0, seed: int = 0,
              data_path="poisson_observed.csv", trials_path: Optional[str] = None) -> PlotSeries:
    """Build the series for `experiment` and write it as CSV to `output` (a path or stream)."""
    if experiment not in EXPERIMENTS:
        raise InvalidArgument(f"Unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}")
    if experiment == "trial-pvalues":
        if trials_path is None:
            raise InvalidArgument("trial-pvalues needs a trials file")
        plot = _trial_series(trials_path)
    else:
        plot = _poisson_series(experiment, lam, seed, data_path)

    if output is not None:
        text = plot.to_csv()
        if hasattr(output, "write"):
            output.write(text)
        else:
            with open(output, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        logger.info("Wrote %s plot data (%d rows)", experiment, len(plot.x))
    return plot
