"""Hypothesis search: pick a minimum-cost subset of the hypothesis space that
entails an example, using weak constraints."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .bias import PredicateSchema
from .instance import Example
from .rules import HypRule, HypothesisSpace, render_rule
from .solver import Mode, SolverClient, SolveRequest, SolverError, Status, default_client
from .terms import Function, render

DEFAULT_TARGET = PredicateSchema("t1", "valid_move", ("cell", "time"))


@dataclass(frozen=True)
class Hypothesis:
    rules: tuple[HypRule, ...]
    costs: tuple[int, ...]
    optimal: bool = True  # optimality proven by the solver
    quality: int | None = None
    n_examples: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "costs", tuple(self.costs))
        if len(self.rules) != len(self.costs):
            raise ValueError("one cost per rule is required")

    @property
    def total_cost(self) -> int:
        return sum(self.costs)

    @property
    def complete(self) -> bool:
        """True when the hypothesis was checked against every example and satisfies all of them."""
        return self.quality is not None and self.quality == self.n_examples

    def with_quality(self, quality: int, n_examples: int) -> "Hypothesis":
        return replace(self, quality=quality, n_examples=n_examples)

    def program(self) -> str:
        return "\n".join(render_rule(r) for r in self.rules)

    def lines(self) -> list[str]:
        return [render_rule(r) for r in self.rules]


def rule_tag(rule: HypRule) -> str:
    """Stable tag derived from the rendered rule text."""
    return "r_" + hashlib.sha1(render_rule(rule).encode("utf-8")).hexdigest()[:12]


def transform_rule(rule: HypRule, cost: int) -> str:
    tag = rule_tag(rule)
    return "\n".join([render_rule(rule, extra=[f"use({tag})"]),
                      f"{{ use({tag}) }}.",
                      f":~ use({tag}). [{cost}@0,{tag}]"])


def _pattern(target: PredicateSchema, name: str) -> str:
    if not target.arity:
        return name
    return f"{name}({','.join(f'X{i}' for i in range(1, target.arity + 1))})"


def _pos_atom(atom: Function, prefix_args: tuple = ()) -> str:
    return render(Function("pos_" + atom.name, prefix_args + atom.args)) + "."


def build_verify(label: Iterable[Function], target: PredicateSchema = DEFAULT_TARGET) -> str:
    """Constraints requiring that the target extension equals the label exactly."""
    label = sorted(label, key=render)
    lines = [_pos_atom(a) for a in label]
    if label:
        lines.append(f"covered :- {', '.join(render(a) for a in label)}.")
    else:
        lines.append("covered.")
    lines.append(f"violated :- {_pattern(target, target.name)}, not {_pattern(target, 'pos_' + target.name)}.")
    lines.append("good_example :- covered, not violated.")
    lines.append(":- not good_example.")
    return "\n".join(lines)


def build_verify_multi(labels: Sequence[Iterable[Function]], target: PredicateSchema = DEFAULT_TARGET) -> str:
    """Verification for several examples evaluated in one answer set.

    The allowed target atoms are the union of all labels; each example must be
    covered individually.
    """
    labels = [sorted(l, key=render) for l in labels]
    union = sorted({a for l in labels for a in l}, key=render)
    lines = [_pos_atom(a) for a in union]
    for i, label in enumerate(labels):
        lines.append(f"example({i}).")
        if label:
            lines.append(f"covered({i}) :- {', '.join(render(a) for a in label)}.")
        else:
            lines.append(f"covered({i}).")
    lines.append(f"violated(E) :- example(E), {_pattern(target, target.name)}, "
                 f"not {_pattern(target, 'pos_' + target.name)}.")
    lines.append("good_example(E) :- covered(E), not violated(E).")
    lines.append(":- example(E), not good_example(E).")
    return "\n".join(lines)


def _facts(atoms: Iterable[Function]) -> str:
    return "\n".join(sorted(render(a) + "." for a in atoms))


def _fragments(hspace: HypothesisSpace) -> str:
    return "\n".join(transform_rule(r, bd.total) for r, bd in hspace)


def build_phs(bk: str, trace: Iterable[Function], label: Iterable[Function], hspace: HypothesisSpace,
              target: PredicateSchema = DEFAULT_TARGET) -> str:
    return "\n".join([bk, _facts(trace), _fragments(hspace), build_verify(label, target), "#show use/1."])


def build_phs_multi(bk: str, examples: Sequence[Example], hspace: HypothesisSpace,
                    target: PredicateSchema = DEFAULT_TARGET) -> str:
    """One program for all examples. Their traces share one answer set, so
    background rules relating different time points may interfere."""
    trace = {a for e in examples for a in e.trace}
    return "\n".join([bk, _facts(trace), _fragments(hspace),
                      build_verify_multi([e.valid_moves for e in examples], target), "#show use/1."])


def _extract(result, hspace: HypothesisSpace) -> Hypothesis | None:
    if result.status is not Status.SAT:
        return None
    used = {a.args[0].name for a in result.best.atoms if a.name == "use" and len(a.args) == 1}
    chosen = [(r, bd.total) for r, bd in hspace if rule_tag(r) in used]
    return Hypothesis(tuple(r for r, _ in chosen), tuple(c for _, c in chosen), optimal=result.exhaustive)


def _search(program: str, hspace: HypothesisSpace, solver: SolverClient | None,
            time_limit: float | None) -> Hypothesis | None:
    solver = solver or default_client()
    try:
        result = solver.solve(SolveRequest(program, Mode.OPTIMIZE, time_limit))
    except SolverError:
        return None
    return _extract(result, hspace)


def find_hypothesis(bk: str, trace: Iterable[Function], label: Iterable[Function], hspace: HypothesisSpace,
                    solver: SolverClient | None = None, time_limit: float | None = None,
                    target: PredicateSchema = DEFAULT_TARGET) -> Hypothesis | None:
    """Best hypothesis for one example, or None if none exists in the space
    (or none was found in time). ``optimal`` tells whether minimality was proven."""
    return _search(build_phs(bk, trace, label, hspace, target), hspace, solver, time_limit)


def find_hypothesis_multi(bk: str, examples: Sequence[Example], hspace: HypothesisSpace,
                          solver: SolverClient | None = None, time_limit: float | None = None,
                          target: PredicateSchema = DEFAULT_TARGET) -> Hypothesis | None:
    return _search(build_phs_multi(bk, examples, hspace, target), hspace, solver, time_limit)
