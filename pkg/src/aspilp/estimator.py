"""scikit-learn style wrapper around the learning loop.

``fit`` takes a whole instance (background, bias and examples) because the
hypothesis depends on all three; ``predict`` labels test traces.
"""
from __future__ import annotations

import os
from typing import Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .driver import DriverConfig, RunReport, run, run_batch
from .evaluation import predict_all
from .instance import InstanceFile, TestTrace, Verdict, load_instance, parse_instance
from .rules import CostConfig, HardLimits


def check_instance(X) -> InstanceFile:
    """Accept an InstanceFile, a path to an instance file, or instance text."""
    if isinstance(X, InstanceFile):
        return X
    if isinstance(X, os.PathLike) or (isinstance(X, str) and "\n" not in X and os.path.exists(X)):
        return load_instance(X)
    if isinstance(X, str):
        return parse_instance(X)
    raise TypeError(f"expected an instance, a path or instance text, got {type(X).__name__}")


def check_tests(X) -> list[TestTrace]:
    if isinstance(X, (InstanceFile, str, os.PathLike)):
        return list(check_instance(X).tests)
    tests = list(X)
    for t in tests:
        if not isinstance(t, TestTrace):
            raise TypeError(f"expected TestTrace items, got {type(t).__name__}")
    return tests


class ILPClassifier(BaseEstimator):
    """Learn valid-move rules from an instance and classify test traces.

    Parameters mirror :class:`~aspilp.driver.DriverConfig`.
    """

    def __init__(self, climit_min: int = 4, climit_max: int | None = 15, time_limit: float | None = 5.0,
                 backend: str = "asp", invention_enabled: bool = True, limits: HardLimits | None = None,
                 costs: CostConfig | None = None, batch: bool = False, budget: float | None = None):
        self.climit_min = climit_min
        self.climit_max = climit_max
        self.time_limit = time_limit
        self.backend = backend
        self.invention_enabled = invention_enabled
        self.limits = limits
        self.costs = costs
        self.batch = batch
        self.budget = budget

    def _config(self) -> DriverConfig:
        return DriverConfig(self.climit_min, self.climit_max, self.time_limit, self.backend,
                            self.invention_enabled, self.limits or HardLimits(), self.costs or CostConfig(),
                            self.budget)

    def fit(self, X, y=None):
        instance = check_instance(X)
        self.report_ = RunReport()
        learn = run_batch if self.batch else run
        self.hypothesis_ = learn(instance, self._config(), None, report=self.report_)
        self.background_ = instance.background_text
        self.target_ = instance.target
        self.quality_ = self.hypothesis_.quality if self.hypothesis_ else 0
        self.n_examples_ = len(instance.examples)
        return self

    def predict(self, X) -> list[Verdict]:
        check_is_fitted(self, "hypothesis_")
        tests = check_tests(X)
        if self.hypothesis_ is None:
            return [Verdict.INVALID] * len(tests)
        predictions = predict_all(self.background_, self.hypothesis_, tests, time_limit=self.time_limit,
                                  target=self.target_)
        return [v for _, v in predictions]

    def score(self, X, y: Sequence) -> float:
        """Fraction of test traces labelled correctly."""
        predicted = self.predict(X)
        if len(predicted) != len(y):
            raise ValueError("X and y have different lengths")
        if not predicted:
            return 0.0
        return sum(Verdict(p) == Verdict(t) for p, t in zip(predicted, y)) / len(predicted)
