"""Evaluate hypotheses on examples and test traces."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .bias import PredicateSchema
from .induction import DEFAULT_TARGET, Hypothesis
from .instance import Example, TestTrace, Verdict
from .solver import Mode, SolverClient, SolveRequest, SolverError, Status, default_client
from .terms import Function, render


class Outcome(str, Enum):
    OK = "ok"
    UNSAT = "unsat"
    TIMEOUT = "timeout"
    ERROR = "error"


@dataclass(frozen=True)
class Evaluation:
    outcome: Outcome
    extension: frozenset | None = None


def evaluation_program(bk: str, h: Hypothesis, trace, target: PredicateSchema = DEFAULT_TARGET) -> str:
    facts = "\n".join(sorted(render(a) + "." for a in trace))
    return "\n".join([bk, h.program(), facts, f"#show {target.name}/{target.arity}."])


def evaluate(bk: str, h: Hypothesis, trace, solver: SolverClient | None = None,
             time_limit: float | None = None, target: PredicateSchema = DEFAULT_TARGET) -> Evaluation:
    """Target extension in the first answer set of bk ∪ h ∪ trace."""
    solver = solver or default_client()
    try:
        res = solver.solve(SolveRequest(evaluation_program(bk, h, trace, target), Mode.SAT_ONE, time_limit))
    except SolverError:
        return Evaluation(Outcome.ERROR)
    if res.status is Status.UNSAT:
        return Evaluation(Outcome.UNSAT)
    if res.status is Status.UNKNOWN:
        return Evaluation(Outcome.TIMEOUT if res.timed_out or res.cancelled else Outcome.ERROR)
    ext = frozenset(a for a in res.models[0].atoms if a.name == target.name and a.arity == target.arity)
    return Evaluation(Outcome.OK, ext)


def evaluate_extension(bk: str, h: Hypothesis, trace, solver: SolverClient | None = None,
                       time_limit: float | None = None,
                       target: PredicateSchema = DEFAULT_TARGET) -> frozenset | None:
    return evaluate(bk, h, trace, solver, time_limit, target).extension


def check_example(bk: str, h: Hypothesis, example: Example, solver: SolverClient | None = None,
                  time_limit: float | None = None, target: PredicateSchema = DEFAULT_TARGET) -> bool:
    ext = evaluate_extension(bk, h, example.trace, solver, time_limit, target)
    return ext is not None and ext == example.valid_moves


def quality(bk: str, h: Hypothesis, examples: Sequence[Example], solver: SolverClient | None = None,
            time_limit: float | None = None, target: PredicateSchema = DEFAULT_TARGET,
            workers: int = 1) -> int:
    """Number of examples the hypothesis reproduces exactly."""
    check = lambda e: check_example(bk, h, e, solver, time_limit, target)
    if workers > 1 and len(examples) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(check, examples))
    return sum(check(e) for e in examples)


def moves(trace, position: str = "agent_at") -> list[tuple]:
    """(cell, time) pairs the agent moved to: agent_at(C2,T+1) after agent_at(C1,T)
    gives (C2, T). Time points without a successor contribute nothing."""
    at: dict[int, list] = {}
    for a in trace:
        if a.name == position and len(a.args) == 2 and isinstance(a.args[1], int):
            at.setdefault(a.args[1], []).append(a.args[0])
    out = []
    for t in sorted(at):
        for cell in at.get(t + 1, []):
            out.append((cell, t))
    return out


def predict(bk: str, h: Hypothesis, test: TestTrace, solver: SolverClient | None = None,
            time_limit: float | None = None, target: PredicateSchema = DEFAULT_TARGET,
            position: str = "agent_at") -> Verdict:
    ext = evaluate_extension(bk, h, test.trace, solver, time_limit, target)
    if ext is None:
        return Verdict.INVALID
    for cell, t in moves(test.trace, position):
        if Function(target.name, (cell, t)) not in ext:
            return Verdict.INVALID
    return Verdict.VALID


def predict_all(bk: str, h: Hypothesis, tests: Sequence[TestTrace], solver: SolverClient | None = None,
                time_limit: float | None = None, target: PredicateSchema = DEFAULT_TARGET,
                workers: int = 1) -> list[tuple[int, Verdict]]:
    run = lambda t: (t.id, predict(bk, h, t, solver, time_limit, target))
    if workers > 1 and len(tests) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, tests))
    return [run(t) for t in tests]
