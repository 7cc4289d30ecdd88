"""Experiment harness: point-file ingestion, orchestration and the CLI."""
from .experiment import ALGORITHMS, RunConfig, RunRecord, run_experiment
from .io import FileSource, parse_points

__all__ = ["ALGORITHMS", "RunConfig", "RunRecord", "run_experiment", "FileSource", "parse_points"]
