"""Best-effort learning loop: learn from one example at a time under growing
cost limits, validate on all examples, and emit an attempt whenever the
number of reproduced examples improves."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

from .bias import Bias
from .evaluation import check_example, predict_all
from .hypospace_asp import generate_space_asp
from .induction import Hypothesis, find_hypothesis, find_hypothesis_multi
from .instance import InstanceFile, write_attempt
from .native import enumerate_space, max_rule_cost
from .rules import CostConfig, HardLimits, HypothesisSpace
from .solver import SolverClient, default_client

BACKENDS = ("asp", "native")


@dataclass(frozen=True)
class DriverConfig:
    climit_min: int = 4
    climit_max: int | None = 15  # None for unbounded
    time_limit: float | None = 5.0  # per solver call
    backend: str = "asp"
    invention_enabled: bool = True
    limits: HardLimits = field(default_factory=HardLimits)
    costs: CostConfig = field(default_factory=CostConfig)
    budget: float | None = None  # overall wall clock, checked between solver calls
    workers: int = 1

    def __post_init__(self):
        if self.climit_min < 1:
            raise ValueError("climit_min must be at least 1")
        if self.climit_max is not None and self.climit_max < self.climit_min:
            raise ValueError("climit_min must not exceed climit_max")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive or None")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")

    @classmethod
    def competition(cls, **overrides) -> "DriverConfig":
        return cls(**{"climit_min": 4, "climit_max": 15, "time_limit": 5.0, **overrides})

    @classmethod
    def general(cls, **overrides) -> "DriverConfig":
        return cls(**{"climit_min": 1, "climit_max": None, **overrides})

    def climits(self, bias: Bias) -> range:
        """Cost limits to try. An unbounded maximum stops once the space can
        no longer grow."""
        top = self.climit_max
        if top is None:
            top = max(self.climit_min, max_rule_cost(bias, self.limits, self.costs, self.invention_enabled) + 1)
        return range(self.climit_min, top + 1)


class RunReport:
    """Structured run log, kept in memory and optionally written as JSON lines."""

    def __init__(self, path=None):
        self.events: list[dict] = []
        self._start = time.monotonic()
        self._fh = open(path, "w", encoding="utf-8") if path else None

    def emit(self, kind: str, **data) -> None:
        event = {"event": kind, "elapsed": round(time.monotonic() - self._start, 4), **data}
        self.events.append(event)
        if self._fh:
            self._fh.write(json.dumps(event, sort_keys=True) + "\n")
            self._fh.flush()

    def of_kind(self, kind: str) -> list[dict]:
        return [e for e in self.events if e["event"] == kind]

    def close(self) -> None:
        if self._fh:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class SpaceCache:
    """Hypothesis spaces per cost limit; they depend only on bias and settings."""

    def __init__(self, bias: Bias, cfg: DriverConfig, solver: SolverClient):
        self.bias, self.cfg, self.solver = bias, cfg, solver
        self._spaces: dict[int, HypothesisSpace] = {}

    def get(self, climit: int) -> HypothesisSpace:
        if climit not in self._spaces:
            c = self.cfg
            if c.backend == "asp":
                space = generate_space_asp(self.bias, c.limits, c.costs, climit, self.solver,
                                           c.invention_enabled, c.time_limit)
            else:
                space = enumerate_space(self.bias, c.limits, c.costs, climit, c.invention_enabled)
            self._spaces[climit] = space
        return self._spaces[climit]


def _sink(attempt_sink) -> Callable[[str], None]:
    if attempt_sink is None:
        return lambda text: None
    if hasattr(attempt_sink, "write"):
        def write(text: str) -> None:
            attempt_sink.write(text)
            if hasattr(attempt_sink, "flush"):
                attempt_sink.flush()
        return write
    return attempt_sink


class _Run:
    def __init__(self, instance: InstanceFile, cfg: DriverConfig, attempt_sink, solver, report):
        self.instance = instance
        self.cfg = cfg
        self.write = _sink(attempt_sink)
        self.solver = solver or default_client()
        self.report = report if report is not None else RunReport()
        self.bk = instance.background_text
        self.bias = instance.bias()
        self.spaces = SpaceCache(self.bias, cfg, self.solver)
        self.start = time.monotonic()

    def out_of_time(self) -> bool:
        return self.cfg.budget is not None and time.monotonic() - self.start > self.cfg.budget

    def per_example(self, h: Hypothesis) -> dict[int, bool]:
        return {e.id: check_example(self.bk, h, e, self.solver, self.cfg.time_limit, self.instance.target)
                for e in self.instance.examples}

    def space(self, climit: int) -> HypothesisSpace:
        space = self.spaces.get(climit)
        self.report.emit("space", climit=climit, size=len(space), exhaustive=space.exhaustive,
                         seconds=round(space.seconds, 4))
        return space

    def attempt(self, h: Hypothesis) -> None:
        predictions = predict_all(self.bk, h, self.instance.tests, self.solver, self.cfg.time_limit,
                                  self.instance.target, self.cfg.workers)
        self.write(write_attempt(predictions, self.instance.tests))
        self.report.emit("attempt", quality=h.quality, predictions={str(i): v.value for i, v in predictions})

    def finish(self, best: Hypothesis | None) -> Hypothesis | None:
        self.report.emit("done", found=best is not None,
                         hypothesis=best.lines() if best else [],
                         quality=best.quality if best else 0,
                         examples=len(self.instance.examples),
                         complete=bool(best and best.complete),
                         seconds=round(time.monotonic() - self.start, 4))
        return best


def run(instance: InstanceFile, cfg: DriverConfig | None = None, attempt_sink=None,
        solver: SolverClient | None = None, report: RunReport | None = None) -> Hypothesis | None:
    """Learn from examples in order of trace length and return the hypothesis
    that reproduces the most examples (None if no hypothesis was found).

    An attempt is written only when the best quality strictly improves, and
    the run ends as soon as a hypothesis reproduces every example.
    """
    cfg = cfg or DriverConfig()
    r = _Run(instance, cfg, attempt_sink, solver, report)
    examples = sorted(instance.examples, key=len)  # stable: ties keep instance order
    n = len(examples)
    r.report.emit("start", examples=[e.id for e in examples], tests=len(instance.tests),
                  backend=cfg.backend, climit_min=cfg.climit_min, climit_max=cfg.climit_max)
    best, best_quality = None, 0
    for ex in examples:
        r.report.emit("example", id=ex.id, trace_length=len(ex))
        for climit in cfg.climits(r.bias):
            if r.out_of_time():
                r.report.emit("budget_exhausted")
                return r.finish(best)
            space = r.space(climit)
            if not len(space):
                continue
            h = find_hypothesis(r.bk, ex.trace, ex.valid_moves, space, r.solver, cfg.time_limit,
                                instance.target)
            if h is None:
                continue
            results = r.per_example(h)
            h = h.with_quality(sum(results.values()), n)
            r.report.emit("hypothesis", example=ex.id, climit=climit, rules=h.lines(), cost=h.total_cost,
                          optimal=h.optimal, quality=h.quality,
                          per_example={str(k): v for k, v in results.items()})
            if h.quality > best_quality:
                best, best_quality = h, h.quality
                r.attempt(h)
                if best_quality == n:
                    return r.finish(best)
            break  # continue with the next example
    return r.finish(best)


def run_batch(instance: InstanceFile, cfg: DriverConfig | None = None, attempt_sink=None,
              solver: SolverClient | None = None, report: RunReport | None = None) -> Hypothesis | None:
    """Search one hypothesis for all examples together.

    All traces share one answer set, so this is only sound when background
    rules cannot relate atoms of different examples.
    """
    cfg = cfg or DriverConfig()
    r = _Run(instance, cfg, attempt_sink, solver, report)
    examples = list(instance.examples)
    r.report.emit("start", examples=[e.id for e in examples], tests=len(instance.tests),
                  backend=cfg.backend, batch=True, climit_min=cfg.climit_min, climit_max=cfg.climit_max)
    if not examples:
        return r.finish(None)
    for climit in cfg.climits(r.bias):
        if r.out_of_time():
            r.report.emit("budget_exhausted")
            break
        space = r.space(climit)
        if not len(space):
            continue
        h = find_hypothesis_multi(r.bk, examples, space, r.solver, cfg.time_limit, instance.target)
        if h is None:
            continue
        results = r.per_example(h)
        h = h.with_quality(sum(results.values()), len(examples))
        r.report.emit("hypothesis", example=None, climit=climit, rules=h.lines(), cost=h.total_cost,
                      optimal=h.optimal, quality=h.quality,
                      per_example={str(k): v for k, v in results.items()})
        r.attempt(h)
        return r.finish(h)
    return r.finish(None)
