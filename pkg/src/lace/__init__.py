"""Collective entity resolution with global (object) and local (value) merges."""

from .engine import (
    BudgetExceeded,
    NoSolution,
    SolutionState,
    applicable_merges,
    cert_ans,
    cert_merge,
    enumerate_max_solutions,
    enumerate_solutions,
    existence,
    hard_close,
    max_rec_check,
    poss_ans,
    poss_merge,
    rec_check,
)
from .model import Cell, Constant, Database, Fact, Kind, Partition, Relation, Schema, SimilarityOracle
from .syntax import Workspace, load_sources, parse_workspace

__version__ = "0.1.0"
