"""
Command-line tests through click's CliRunner.
"""
import csv
import io
import json

import numpy as np
import pytest
from click.testing import CliRunner
from scipy import stats

from discretegof.cli import RunConfig, build_config, cli
from discretegof.config import get_default_run_config
from discretegof.errors import InvalidArgument


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args], catch_exceptions=False)


def read_plot(text):
    return list(csv.DictReader(io.StringIO(text)))


# ============================================================================
# TEST COMMAND
# ============================================================================

def test_candy_run(runner):
    result = invoke(runner, "test", "--data", "candy.csv", "--model", "uniform:5",
                    "--stats", "euclid,chi2,g2,ft", "--sims", 2000, "--seed", 4, "--workers", 1)
    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["tool"] == "discretegof"
    assert document["command"] == "test"
    assert document["n"] == 62
    assert document["config"]["seed"] == 4
    reports = {r["statistic"]: r for r in document["reports"]}
    assert list(reports) == ["euclidean", "chi2", "g2", "freeman_tukey"]
    assert reports["euclidean"]["hits"] == reports["chi2"]["hits"]
    assert 0.6 < reports["euclidean"]["p_value"] < 0.9


def test_rerun_is_byte_identical(runner):
    args = ("test", "--data", "candy.csv", "--model", "candy_model.csv", "--stats", "ks,l1",
            "--sims", 3000, "--seed", 8)
    first = invoke(runner, *args, "--workers", 1)
    second = invoke(runner, *args, "--workers", 2)
    assert first.exit_code == 0 and second.exit_code == 0
    assert first.output == second.output


def test_output_file(runner, tmp_path):
    target = tmp_path / "report.json"
    result = invoke(runner, "test", "--data", "candy.csv", "--model", "uniform:5",
                    "--sims", 100, "--workers", 1, "-o", target)
    assert result.exit_code == 0
    assert result.output == ""
    assert json.loads(target.read_text())["reports"][0]["statistic"] == "ks"


def test_hardy_weinberg_worst_ordering(runner):
    result = invoke(runner, "test", "--data", "rhesus.csv", "--model", "hw", "--stats", "ks",
                    "--ordering", "worst", "--sims", 200, "--workers", 1)
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)["reports"][0]
    assert report["ordering"] == "worst"


def test_empty_data_file(runner, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    result = invoke(runner, "test", "--data", empty, "--model", "uniform:5", "--sims", 10)
    assert result.exit_code == 2
    assert "empty.csv" in result.output
    assert "empty" in result.output


def test_malformed_row_names_line(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("label,count\nred,5\nblue,x\n")
    result = invoke(runner, "test", "--data", bad, "--model", "uniform:2", "--sims", 10)
    assert result.exit_code == 2
    assert "bad.csv:3" in result.output


def test_incompatible_dimensions(runner):
    result = invoke(runner, "test", "--data", "candy.csv", "--model", "uniform:4", "--sims", 10)
    assert result.exit_code == 2
    assert "error:" in result.output


def test_bad_simulation_count(runner):
    result = invoke(runner, "test", "--data", "candy.csv", "--model", "uniform:5", "--sims", 0)
    assert result.exit_code == 2


def test_unknown_statistic(runner):
    result = invoke(runner, "test", "--data", "candy.csv", "--model", "uniform:5", "--stats", "cvm")
    assert result.exit_code == 2
    assert "cvm" in result.output


def test_sparse_model_needs_draws(runner):
    result = invoke(runner, "test", "--data", "candy.csv", "--model", "sparse-uniform:5", "--sims", 10)
    assert result.exit_code == 2
    assert "rng-uniform" in result.output


# ============================================================================
# TRIALS
# ============================================================================

def test_trials_lines(runner):
    result = invoke(runner, "trials", "--data", "candy.csv", "--model", "uniform:5",
                    "--trials", 3, "--sims", 500, "--workers", 1)
    assert result.exit_code == 0, result.output
    records = [json.loads(line) for line in result.output.splitlines()]
    assert [r["trial"] for r in records] == [1, 2, 3]
    assert records[0]["ordering"] == "identity"
    assert records[1]["ordering"] == "pseudorandom(seed=0, trial=2)"
    assert all(r["command"] == "trials" for r in records)


def test_zero_trials_rejected(runner):
    result = invoke(runner, "trials", "--data", "candy.csv", "--model", "uniform:5",
                    "--trials", 0, "--sims", 10)
    assert result.exit_code == 2


def test_trials_plot(runner, tmp_path):
    lines = tmp_path / "trials.jsonl"
    plot = tmp_path / "trials.csv"
    result = invoke(runner, "trials", "--data", "candy.csv", "--model", "uniform:5",
                    "--stats", "ks,euclidean", "--trials", 2, "--sims", 300, "--workers", 1,
                    "-o", lines, "--plot", plot)
    assert result.exit_code == 0, result.output
    rows = read_plot(plot.read_text())
    assert [row["statistic"] for row in rows] == ["ks", "euclidean"]
    assert rows[1]["trial_1"] == rows[1]["trial_2"]


def test_trials_plot_needs_output(runner, tmp_path):
    result = invoke(runner, "trials", "--data", "candy.csv", "--model", "uniform:5",
                    "--trials", 1, "--sims", 10, "--workers", 1, "--plot", tmp_path / "p.csv")
    assert result.exit_code == 2


# ============================================================================
# THEORY
# ============================================================================

def test_theory_power(runner):
    result = invoke(runner, "theory", "power", "--m", 4, "--c", 0.1, "--trials", 2000)
    assert result.exit_code == 0, result.output
    record = json.loads(result.output)
    assert record["u"] == pytest.approx(0.2)
    assert record["v_min"] == pytest.approx(0.1)
    assert record["v_max"] == pytest.approx(0.2)
    assert record["mean"]["target"] == pytest.approx(0.4 / 3)
    assert record["command"] == "theory power"
    assert record["config"] == {"m": 4, "c": 0.1}


def test_theory_record_carries_provenance(runner):
    args = ("theory", "null-ks", "--model", "uniform:50", "--n", 200, "--trials", 300, "--seed", 8)
    first = invoke(runner, *args)
    assert first.exit_code == 0, first.output
    record = json.loads(first.output)
    assert record["tool"] == "discretegof"
    assert record["command"] == "theory null-ks"
    assert record["seed"] == 8
    assert record["trials"] == 300
    assert record["rng_id"] and record["version"]
    assert record["config"] == {"model": "uniform:50", "data": None, "n": 200}
    assert record["claim"] == "null-ks"
    assert invoke(runner, *args).output == first.output


def test_theory_bridge(runner):
    result = invoke(runner, "theory", "bridge", "--m", 2, "--trials", 10)
    assert result.exit_code == 0
    assert json.loads(result.output)["passed"] is True


def test_theory_null_euclid_fits_parametric_model(runner):
    result = invoke(runner, "theory", "null-euclid", "--model", "hw", "--data", "rhesus.csv",
                    "--n", 100, "--trials", 200)
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["m"] == 45


def test_theory_sparse_limit(runner):
    result = invoke(runner, "theory", "sparse-limit", "--n", 2, "--M", 4, "--max-ratio", 1,
                    "--trials", 4000)
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["target"] == pytest.approx(0.25)


def test_theory_bad_arguments(runner):
    assert invoke(runner, "theory", "bridge", "--m", 3, "--trials", 10).exit_code == 2
    assert invoke(runner, "theory", "power", "--m", 4, "--c", 1.0).exit_code == 2


def test_unknown_claim(runner):
    result = runner.invoke(cli, ["theory", "galaxy"])
    assert result.exit_code == 2


# ============================================================================
# RNG-UNIFORM
# ============================================================================

def test_sequential_generator(runner):
    result = invoke(runner, "rng-uniform", "--generator", "sequential:1000", "--sims", 2000,
                    "--workers", 1)
    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["n"] == 1000 and document["occupied"] == 1000
    reports = {r["statistic"]: r for r in document["reports"]}
    assert reports["ks"]["p_value"] == 0.0
    assert reports["euclidean"]["p_value"] >= 0.999


def test_draws_text_file(runner, tmp_path):
    draws = tmp_path / "draws.txt"
    draws.write_text("3\n7\n\n3\n")
    result = invoke(runner, "rng-uniform", "--draws", draws, "--M", 10, "--sims", 100, "--workers", 1)
    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["n"] == 3 and document["occupied"] == 2


def test_draws_binary_file(runner, tmp_path):
    draws = tmp_path / "draws.bin"
    draws.write_bytes(np.array([0, 4, 9], dtype="<u4").tobytes())
    result = invoke(runner, "rng-uniform", "--draws", draws, "--M", 10, "--sims", 100, "--workers", 1)
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["n"] == 3


def test_empty_draws(runner, tmp_path):
    draws = tmp_path / "none.txt"
    draws.write_text("\n")
    result = invoke(runner, "rng-uniform", "--draws", draws, "--M", 10, "--sims", 10)
    assert result.exit_code == 2
    assert "no draws" in result.output


def test_out_of_range_text_draw_names_line(runner, tmp_path):
    draws = tmp_path / "draws.txt"
    draws.write_text("1\n2\n0\n")
    result = invoke(runner, "rng-uniform", "--draws", draws, "--M", 10, "--sims", 10)
    assert result.exit_code == 2
    assert "draws.txt:3" in result.output


def test_out_of_range_binary_draw_names_offset(runner, tmp_path):
    draws = tmp_path / "draws.bin"
    draws.write_bytes(np.array([0, 20], dtype="<u4").tobytes())
    result = invoke(runner, "rng-uniform", "--draws", draws, "--M", 10, "--sims", 10)
    assert result.exit_code == 2
    assert "byte offset 4" in result.output


def test_rng_uniform_needs_one_source(runner, tmp_path):
    assert invoke(runner, "rng-uniform", "--sims", 10).exit_code == 2
    draws = tmp_path / "d.txt"
    draws.write_text("1\n")
    assert invoke(runner, "rng-uniform", "--draws", draws, "--generator", "philox:5").exit_code == 2


def test_rng_uniform_rejects_chi2(runner):
    result = invoke(runner, "rng-uniform", "--generator", "philox:10", "--stats", "chi2", "--sims", 10)
    assert result.exit_code == 2


# ============================================================================
# PLOT AND DATASETS
# ============================================================================

def test_plot_cmf_observed(runner):
    result = invoke(runner, "plot", "poisson-cmf-observed")
    assert result.exit_code == 0, result.output
    rows = read_plot(result.output)
    model = [float(r["model"]) for r in rows]
    observed = [float(r["observed"]) for r in rows]
    assert all(b >= a for a, b in zip(model, model[1:]))
    assert all(b >= a for a, b in zip(observed, observed[1:]))
    assert observed[-1] == 1.0
    assert abs(model[-1] - 1.0) <= 1e-12


def test_plot_pmf_observed(runner):
    rows = read_plot(invoke(runner, "plot", "poisson-pmf-observed").output)
    row = next(r for r in rows if r["x"] == "105")
    assert float(row["observed"]) == pytest.approx(0.1)
    assert float(row["model"]) == pytest.approx(stats.poisson.pmf(105, 100), rel=1e-10)
    assert float(row["model"]) == pytest.approx(0.03438, abs=1e-4)


def test_plot_simulated_is_reproducible(runner):
    first = invoke(runner, "plot", "poisson-pmf-simulated", "--seed", 3).output
    second = invoke(runner, "plot", "poisson-pmf-simulated", "--seed", 3).output
    assert first == second
    assert sum(float(r["simulated"]) for r in read_plot(first)) == pytest.approx(1.0)


def test_plot_unknown_experiment(runner):
    assert runner.invoke(cli, ["plot", "histogram"]).exit_code == 2


def test_plot_trials_needs_file(runner):
    assert invoke(runner, "plot", "trial-pvalues").exit_code == 2


def test_datasets(runner):
    result = invoke(runner, "datasets")
    assert result.exit_code == 0
    listing = {r["name"]: r for r in map(json.loads, result.output.splitlines())}
    assert all(r["verified"] for r in listing.values())
    assert listing["rhesus.csv"]["n"] == 8297
    assert listing["rhesus.csv"]["rows"] == 45
    assert listing["candy.csv"]["n"] == 62
    assert "n" not in listing["candy_model.csv"]


def test_version(runner):
    result = invoke(runner, "--version")
    assert result.exit_code == 0
    assert "discretegof" in result.output


# ============================================================================
# RUN CONFIG
# ============================================================================

def test_run_config_json_round_trip():
    config = build_config(subcommand="test", data="candy.csv", model="uniform:5",
                          statistics="ks, euclid", simulations=500, seed=2)
    assert config.statistics == ["ks", "euclid"]
    assert RunConfig.model_validate_json(config.model_dump_json()) == config
    assert "workers" not in config.provenance()


def test_run_config_rejects_unknown_fields():
    with pytest.raises(InvalidArgument):
        build_config(subcommand="test", colour="red")


def test_run_config_rejects_bad_seed():
    with pytest.raises(InvalidArgument):
        build_config(subcommand="test", seed=-1)


def test_run_config_starts_from_defaults():
    defaults = get_default_run_config()
    config = build_config(subcommand="trials")
    assert config.statistics == defaults["statistics"]
    assert config.simulations == defaults["simulations"]
    assert config.ordering == defaults["ordering"]


def test_run_config_rejects_unknown_command():
    with pytest.raises(InvalidArgument, match="Unknown command"):
        build_config(subcommand="shuffle")


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("DISCRETEGOF_WORKERS", "3")
    assert build_config(subcommand="test").resolved_workers() == 3
    assert build_config(subcommand="test", workers=1).resolved_workers() == 1
