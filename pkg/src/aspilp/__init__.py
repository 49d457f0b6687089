"""Inductive logic programming over answer set programs."""
from .bias import Bias, PredicateSchema
from .driver import DriverConfig, RunReport, run, run_batch
from .estimator import ILPClassifier
from .evaluation import check_example, predict, predict_all, quality
from .hypospace_asp import emit_encoding, generate_space_asp
from .induction import Hypothesis, find_hypothesis
from .instance import Example, InstanceFile, TestTrace, Verdict, load_instance, parse_instance
from .native import enumerate_space
from .rules import CostConfig, HardLimits, HypothesisSpace, HypRule, rule_cost
from .solver import SolverClient, SolverError

__all__ = [
    "Bias", "PredicateSchema", "DriverConfig", "RunReport", "run", "run_batch", "ILPClassifier",
    "check_example", "predict", "predict_all", "quality", "emit_encoding", "generate_space_asp",
    "Hypothesis", "find_hypothesis", "Example", "InstanceFile", "TestTrace", "Verdict",
    "load_instance", "parse_instance", "enumerate_space", "CostConfig", "HardLimits",
    "HypothesisSpace", "HypRule", "rule_cost", "SolverClient", "SolverError",
]
