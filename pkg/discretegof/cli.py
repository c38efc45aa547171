"""
discretegof command line.

    discretegof test --data candy.csv --model uniform:5 --stats euclid,chi2,g2,ft
    discretegof trials --data rhesus.csv --model hw --trials 10 --sims 90000
    discretegof theory bridge --m 10000 --trials 10000
    discretegof rng-uniform --generator sequential:1000 --sims 10000
    discretegof plot poisson-cmf-observed -o cmf.csv
    discretegof datasets

Exit status: 0 success, 2 usage or data error, 3 numerical failure.
"""
import functools
import logging
import sys
from typing import List, Optional

import click
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from . import __version__
from .config import (
    DEFAULT_SEED,
    DEFAULT_SIMULATIONS,
    DEFAULT_TRIALS,
    LOG_FORMAT,
    RNG_SUPPORT,
    SPARSE_LIMIT_MAX_RATIO,
    THEORY_TRIALS,
    WORKERS_ENV,
    default_workers,
    get_default_run_config,
    log_level,
    validate_run_config,
)
from .engine.montecarlo import TestSpec, pvalue, pvalue_sparse
from .engine.rng import RNG_ID
from .errors import GofError, InvalidArgument
from .files.datasets import list_datasets
from .files.plots import EXPERIMENTS, emit_plot
from .files.readers import align_counts, generator_draws, load_model, read_counts, read_draw_counts
from .files.reports import json_lines, to_json
from .models.distribution import BinDistribution, EmpiricalCounts
from .models.hardy_weinberg import HardyWeinbergFamily
from .models.parametric import ParametricFamily
from .models.sparse import SparseUniformModel
from .orderings import ordering_trials, pseudorandom_ordering
from .stats.dense import worst_case_ordering
from .stats.kinds import Ordering, StatisticKind
from .theory import (
    PowerScenario,
    null_expectation_euclid,
    null_expectation_ks,
    power_scenario_mean_ks,
    power_scenario_stats,
    sparse_limit_check,
    verify_bridge_constant,
)

logger = logging.getLogger(__name__)


# ============================================================================
# RUN CONFIGURATION
# ============================================================================

class RunConfig(BaseModel):
    """Everything a command was invoked with; serializes to and from JSON."""
    model_config = ConfigDict(extra="forbid")

    subcommand: str
    data: Optional[str] = None
    draws: Optional[str] = None
    model: Optional[str] = None
    statistics: List[str] = ["ks", "euclidean"]
    simulations: int = DEFAULT_SIMULATIONS
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    ordering: str = "canonical"
    support_size: Optional[int] = None
    workers: Optional[int] = None
    output: Optional[str] = None

    @field_validator("statistics", mode="before")
    @classmethod
    def _split(cls, value):
        if isinstance(value, str):
            return [part for part in (p.strip() for p in value.split(",")) if part]
        return value

    def kinds(self):
        return StatisticKind.parse_list(self.statistics)

    def resolved_workers(self) -> int:
        return self.workers if self.workers is not None else default_workers()

    def provenance(self) -> dict:
        """Fields that determine the output (workers and output path do not)."""
        return self.model_dump(exclude={"workers", "output"}, exclude_none=True)


def build_config(**fields) -> RunConfig:
    settings = get_default_run_config()
    settings.update(fields)
    try:
        config = RunConfig(**settings)
    except ValidationError as exc:
        raise InvalidArgument(f"invalid options: {exc.errors()[0]['msg']}") from None
    errors = validate_run_config(config.model_dump())
    if errors:
        raise InvalidArgument("; ".join(errors))
    return config


# ============================================================================
# HELPERS
# ============================================================================

def handle_errors(command):
    """Turn library exceptions into a diagnostic on stderr and an exit status."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except GofError as exc:
            logger.debug("%s failed", command.__name__, exc_info=True)
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(exc.exit_code)
    return wrapper


def emit(text: str, output: Optional[str]):
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        click.echo(text, nl=False)


def header(config: RunConfig) -> dict:
    return {
        "tool": "discretegof",
        "version": __version__,
        "command": config.subcommand,
        "seed": config.seed,
        "rng_id": RNG_ID,
        "simulations": config.simulations,
        "config": config.provenance(),
    }


def theory_document(claim: str, seed: int, trials: int, record: dict, **params) -> dict:
    """A theory record preceded by the fields needed to reproduce it."""
    document = {
        "tool": "discretegof",
        "version": __version__,
        "command": f"theory {claim}",
        "seed": seed,
        "rng_id": RNG_ID,
        "trials": trials,
        "config": params,
    }
    document.update(record)
    return document


def resolve_ordering(name: str, data: EmpiricalCounts, model, seed: int) -> Ordering:
    """
    canonical (lexicographic for Hardy-Weinberg, identity otherwise),
    identity, lexicographic, worst, or pseudorandom:T.
    """
    m = data.num_bins
    key = name.strip().lower()
    if key == "canonical":
        key = "lexicographic" if isinstance(model, HardyWeinbergFamily) else "identity"
    if key == "identity":
        return Ordering.identity(m)
    if key == "lexicographic":
        return Ordering.lexicographic(m)
    if key == "worst":
        fitted = model.fitted_distribution(data) if isinstance(model, ParametricFamily) else model
        return worst_case_ordering(data, fitted)
    if key.startswith("pseudorandom:"):
        try:
            trial = int(key.partition(":")[2])
        except ValueError:
            raise InvalidArgument(f"Ordering {name!r}: cannot read a trial number") from None
        return pseudorandom_ordering(m, seed, trial)
    raise InvalidArgument(
        f"Unknown ordering {name!r}; expected canonical, identity, lexicographic, worst or pseudorandom:T"
    )


def load_test_spec(config: RunConfig) -> TestSpec:
    model = load_model(config.model)
    if isinstance(model, SparseUniformModel):
        raise InvalidArgument("sparse-uniform models take raw draws; use the rng-uniform command")
    data = align_counts(read_counts(config.data), model, source=config.data)
    return TestSpec(
        data=data,
        model=model,
        statistics=config.kinds(),
        ordering=resolve_ordering(config.ordering, data, model, config.seed),
        simulations=config.simulations,
        seed=config.seed,
    )


def stats_option(default="ks,euclidean"):
    return click.option("--stats", "statistics", default=default, show_default=True,
                        help="Comma-separated statistics: ks, euclidean, chi2, g2, freeman_tukey, l1.")


def run_options(command):
    for option in reversed([
        click.option("--sims", "simulations", type=int, default=DEFAULT_SIMULATIONS, show_default=True,
                     help="Number of Monte-Carlo simulations."),
        click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True),
        click.option("--workers", type=int, default=None,
                     help=f"Worker processes (default: ${WORKERS_ENV} or the CPU count)."),
        click.option("--output", "-o", default=None, help="Write to this file instead of stdout."),
    ]):
        command = option(command)
    return command


# ============================================================================
# COMMANDS
# ============================================================================

@click.group(help=f"""Monte-Carlo goodness-of-fit tests for discrete data.

Set {WORKERS_ENV} to choose the default number of worker processes and
LOG_LEVEL for log verbosity; both may live in a .env file.
Exit status: 0 success, 2 usage or data error, 3 numerical failure.""")
@click.version_option(__version__, prog_name="discretegof")
def cli():
    pass


@cli.command("test")
@click.option("--data", required=True, help="Counts CSV (label,count) or a bundled dataset name.")
@click.option("--model", required=True, help="uniform:m, poisson:lambda, hw or a label,prob CSV.")
@stats_option()
@click.option("--ordering", default="canonical", show_default=True,
              help="KS bin order: canonical, identity, lexicographic, worst or pseudorandom:T.")
@run_options
@handle_errors
def test_command(**options):
    """P-values for observed counts against a model."""
    config = build_config(subcommand="test", **options)
    spec = load_test_spec(config)
    reports = pvalue(spec, workers=config.resolved_workers())
    document = header(config)
    document["n"] = spec.data.n
    document["bins"] = spec.data.num_bins
    document["reports"] = [report.to_dict() for report in reports]
    emit(to_json(document) + "\n", config.output)


@cli.command("trials")
@click.option("--data", required=True, help="Counts CSV (label,count) or a bundled dataset name.")
@click.option("--model", required=True, help="uniform:m, poisson:lambda, hw or a label,prob CSV.")
@stats_option()
@click.option("--trials", type=int, default=DEFAULT_TRIALS, show_default=True,
              help="Number of orderings; trial 1 uses the canonical one.")
@click.option("--ordering", default="canonical", show_default=True, help="Ordering of trial 1.")
@click.option("--plot", "plot_path", default=None, help="Also write trial P-values as plot CSV.")
@run_options
@handle_errors
def trials_command(plot_path, **options):
    """KS P-values under several bin orderings (JSON lines)."""
    config = build_config(subcommand="trials", **options)
    spec = load_test_spec(config)
    results = ordering_trials(spec, config.trials, workers=config.resolved_workers())
    base = header(config)
    emit(json_lines({**base, **result.to_dict()} for result in results), config.output)
    if plot_path:
        lines_path = config.output
        if lines_path is None:
            raise InvalidArgument("--plot needs --output so the trial records can be read back")
        emit_plot("trial-pvalues", plot_path, trials_path=lines_path)


@cli.group("theory")
def theory():
    """Empirical checks of the statistics' asymptotic behaviour."""


def theory_options(command):
    for option in reversed([
        click.option("--trials", type=int, default=THEORY_TRIALS, show_default=True),
        click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True),
        click.option("--output", "-o", default=None),
    ]):
        command = option(command)
    return command


@theory.command("bridge")
@click.option("--m", "m", type=int, default=10_000, show_default=True, help="Even sequence length.")
@theory_options
@handle_errors
def theory_bridge(m, trials, seed, output):
    """Mean maximum deviation of a shuffled +-1 bridge."""
    estimate = verify_bridge_constant(m, trials, seed)
    emit(to_json(theory_document("bridge", seed, trials, estimate.to_dict(), m=m)) + "\n", output)


def _null_model(spec: str, data: Optional[str]) -> BinDistribution:
    model = load_model(spec)
    if isinstance(model, SparseUniformModel):
        raise InvalidArgument("Null expectations need a dense model")
    if isinstance(model, ParametricFamily):
        if data is None:
            raise InvalidArgument(f"{spec} is parametric; pass --data to fit it")
        return model.fitted_distribution(align_counts(read_counts(data), model, source=data))
    return model


@theory.command("null-euclid")
@click.option("--model", "model_spec", default="uniform:10000", show_default=True)
@click.option("--data", default=None, help="Counts used to fit a parametric model.")
@click.option("--n", "n", type=int, default=100, show_default=True)
@theory_options
@handle_errors
def theory_null_euclid(model_spec, data, n, trials, seed, output):
    """Mean squared Euclidean distance under the model."""
    estimate = null_expectation_euclid(_null_model(model_spec, data), n, trials, seed)
    document = theory_document("null-euclid", seed, trials, estimate.to_dict(),
                               model=model_spec, data=data, n=n)
    emit(to_json(document) + "\n", output)


@theory.command("null-ks")
@click.option("--model", "model_spec", default="uniform:10000", show_default=True)
@click.option("--data", default=None, help="Counts used to fit a parametric model.")
@click.option("--n", "n", type=int, default=10_000, show_default=True)
@theory_options
@handle_errors
def theory_null_ks(model_spec, data, n, trials, seed, output):
    """Mean of sqrt(n) times the KS statistic under the model."""
    estimate = null_expectation_ks(_null_model(model_spec, data), n, trials, seed)
    document = theory_document("null-ks", seed, trials, estimate.to_dict(),
                               model=model_spec, data=data, n=n)
    emit(to_json(document) + "\n", output)


@theory.command("power")
@click.option("--m", "m", type=int, default=10_000, show_default=True)
@click.option("--c", "c", type=float, default=1e-5, show_default=True)
@theory_options
@handle_errors
def theory_power(m, c, trials, seed, output):
    """Distances of a uniform model perturbed by +-c."""
    u, v_min = power_scenario_stats(PowerScenario.alternating(m, c))
    _, v_max = power_scenario_stats(PowerScenario.sorted(m, c))
    record = {
        "claim": "power", "m": m, "c": c, "u": u, "v_min": v_min, "v_max": v_max,
        "mean": power_scenario_mean_ks(m, c, trials, seed).to_dict(),
    }
    emit(to_json(theory_document("power", seed, trials, record, m=m, c=c)) + "\n", output)


@theory.command("sparse-limit")
@click.option("--n", "n", type=int, default=1000, show_default=True)
@click.option("--M", "support_size", type=int, default=RNG_SUPPORT, show_default=True)
@click.option("--max-ratio", type=float, default=SPARSE_LIMIT_MAX_RATIO, show_default=True,
              help="Largest n/M accepted.")
@theory_options
@handle_errors
def theory_sparse_limit(n, support_size, max_ratio, trials, seed, output):
    """How often the sparse Euclidean distance departs from its collision-free value."""
    estimate = sparse_limit_check(n, support_size, trials, seed, max_ratio=max_ratio)
    document = theory_document("sparse-limit", seed, trials, estimate.to_dict(),
                               n=n, support_size=support_size, max_ratio=max_ratio)
    emit(to_json(document) + "\n", output)


@cli.command("rng-uniform")
@click.option("--draws", default=None, help="Draw file: one integer per line, or little-endian uint32 (.bin).")
@click.option("--generator", default=None, help="sequential:N or philox:N instead of a draw file.")
@click.option("--format", "fmt", type=click.Choice(["auto", "text", "binary"]), default="auto", show_default=True)
@click.option("--M", "support_size", type=int, default=RNG_SUPPORT, show_default=True,
              help="Draws are uniform on 1..M under the model.")
@stats_option()
@run_options
@handle_errors
def rng_uniform_command(generator, fmt, **options):
    """Test a stream of integer draws for uniformity on 1..M."""
    if (options["draws"] is None) == (generator is None):
        raise InvalidArgument("pass exactly one of --draws and --generator")
    config = build_config(subcommand="rng-uniform", model=f"sparse-uniform:{options['support_size']}",
                          **options)
    if generator is not None:
        draws = generator_draws(generator, config.support_size, config.seed)
        data = EmpiricalCounts.from_draws(draws, config.support_size)
    else:
        data = read_draw_counts(config.draws, config.support_size, fmt)
    reports = pvalue_sparse(data, SparseUniformModel(config.support_size), config.kinds(),
                            config.simulations, config.seed, config.resolved_workers())
    document = header(config)
    if generator is not None:
        document["generator"] = generator
    document["n"] = data.n
    document["occupied"] = data.occupied
    document["reports"] = [report.to_dict() for report in reports]
    emit(to_json(document) + "\n", config.output)


@cli.command("plot")
@click.argument("experiment", type=click.Choice(EXPERIMENTS))
@click.option("--output", "-o", default=None, help="CSV file (default: stdout).")
@click.option("--lam", type=float, default=100.0, show_default=True, help="Poisson mean.")
@click.option("--data", default="poisson_observed.csv", show_default=True)
@click.option("--trials-file", default=None, help="JSON lines written by the trials command.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@handle_errors
def plot_command(experiment, output, lam, data, trials_file, seed):
    """Write plot data for a Poisson or trial experiment as CSV."""
    plot = emit_plot(experiment, None, lam=lam, seed=seed, data_path=data, trials_path=trials_file)
    emit(plot.to_csv(), output)


@cli.command("datasets")
def datasets_command():
    """List the bundled datasets with their checksums."""
    click.echo(json_lines(list_datasets()), nl=False)


def main(argv=None):
    load_dotenv()
    logging.basicConfig(level=log_level(), format=LOG_FORMAT, stream=sys.stderr)
    cli.main(args=argv, prog_name="discretegof")


if __name__ == "__main__":
    main()
