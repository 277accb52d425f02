"""Experiment harness: function registry, Legendre baseline, runner, CLI."""

from .experiments import (
    CSV_HEADER,
    EXPERIMENTS,
    EvalPoint,
    ExperimentRecord,
    ExperimentRow,
    ExperimentSpec,
    SlopeFit,
    asym_table,
    lebesgue_sweep,
    run_experiment,
    write_experiment_csv,
    write_experiment_svg,
)
from .functions import FunctionSpec, parse_function
from .legendre import LegendreBaseline, legendre_series

__all__ = [
    "CSV_HEADER",
    "EXPERIMENTS",
    "EvalPoint",
    "ExperimentRecord",
    "ExperimentRow",
    "ExperimentSpec",
    "FunctionSpec",
    "LegendreBaseline",
    "SlopeFit",
    "asym_table",
    "legendre_series",
    "lebesgue_sweep",
    "parse_function",
    "run_experiment",
    "write_experiment_csv",
    "write_experiment_svg",
]
