from .datasets import DATASETS, dataset_path, list_datasets, resolve_path
from .plots import EXPERIMENTS, PlotSeries, emit_plot
from .readers import (
    align_counts,
    generator_draws,
    load_model,
    read_counts,
    read_draw_counts,
    read_draws,
    read_model_csv,
)
from .reports import json_lines, to_json

__all__ = [
    "DATASETS",
    "EXPERIMENTS",
    "PlotSeries",
    "align_counts",
    "dataset_path",
    "emit_plot",
    "generator_draws",
    "json_lines",
    "list_datasets",
    "load_model",
    "read_counts",
    "read_draw_counts",
    "read_draws",
    "read_model_csv",
    "resolve_path",
    "to_json",
]
