"""Decomposition-based multi-objective optimization with stable-matching
environmental selection over incomplete preference lists."""

from .optimizer import OptimizerConfig, RunRecord, run

__all__ = ["OptimizerConfig", "RunRecord", "run"]
__version__ = "0.1.0"
