"""Hybrid ensemble feature selection: rankers, rank aggregation, stability and
a cross-validated evaluation harness for binary-labeled tabular data."""

from hybefs.data import ExpressionMatrix, SyntheticSpec, generate_synthetic, load_csv, write_csv
from hybefs.rankers import FeatureRanking, RANKERS
from hybefs.aggregation import RankingGrid, borda_aggregate, two_stage_aggregate
from hybefs.stability import SelectionSet, consistency_index, kuncheva_index, select_top
from hybefs.strategies import StrategySpec, builtin_roster, run_strategy
from hybefs.experiment import ExperimentResult, run_experiment, DEFAULT_THRESHOLDS

__version__ = "0.1.0"

__all__ = [
    "ExpressionMatrix",
    "SyntheticSpec",
    "generate_synthetic",
    "load_csv",
    "write_csv",
    "FeatureRanking",
    "RANKERS",
    "RankingGrid",
    "borda_aggregate",
    "two_stage_aggregate",
    "SelectionSet",
    "consistency_index",
    "kuncheva_index",
    "select_top",
    "StrategySpec",
    "builtin_roster",
    "run_strategy",
    "ExperimentResult",
    "run_experiment",
    "DEFAULT_THRESHOLDS",
]
