"""Hypothesis space generation with the ASP solver: one answer set per rule."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

from .bias import Bias, PredicateSchema, emit_bias_facts
from .rules import (NEG, POS, CostBreakdown, CostConfig, CostItem, HardLimits, HypLiteral, HypRule,
                    HypothesisSpace, HypVar, canonical_form, is_canonical, rule_cost,
                    signature_ordering_applies)
from .solver import Mode, SolverClient, SolverError, SolveRequest, default_client
from .terms import Function, render

ENCODING_PARTS = ("main", "cost", "redundancy", "invention")


def load_encoding(part: str) -> str:
    if part not in ENCODING_PARTS:
        raise KeyError(part)
    return resources.files(__package__).joinpath("encodings").joinpath(f"{part}.lp").read_text(encoding="utf-8")


class DecodeError(ValueError):
    """An answer set does not describe a well-formed rule."""


@dataclass(frozen=True)
class EncodingBundle:
    main: str
    cost: str
    redundancy: str
    invention: str  # empty when invention is disabled
    facts: tuple[str, ...]
    constants: dict[str, int] = field(hash=False)

    def program(self) -> str:
        """The program without constant definitions (those are passed to the solver)."""
        parts = [self.main, self.cost, self.redundancy]
        if self.invention:
            parts.append(self.invention)
        parts.append("\n".join(self.facts) + "\n")
        return "\n".join(parts)

    def constant_lines(self) -> list[str]:
        return [f"#const {k}={v}." for k, v in self.constants.items()]

    def text(self) -> str:
        """Self-contained program including ``#const`` definitions."""
        return "\n".join(self.constant_lines()) + "\n\n" + self.program()


def invention_facts(limits: HardLimits) -> list[str]:
    return [f"inv_pred(ip({k}),{a},ip_{k}_{a})."
            for k in range(1, limits.maxinventpred + 1)
            for a in range(limits.inv_minarity, limits.inv_maxarity + 1)]


def _max_arity(bias: Bias, limits: HardLimits, invention: bool) -> int:
    m = bias.max_arity
    if invention:
        m = max(m, limits.inv_maxarity)
    return m


def emit_encoding(bias: Bias, limits: HardLimits = HardLimits(), cfg: CostConfig = CostConfig(),
                  climit: int = 6, invention_enabled: bool = True) -> EncodingBundle:
    if climit < 1:
        raise ValueError("climit must be at least 1")
    invention = invention_enabled and limits.maxinventpred > 0
    facts = emit_bias_facts(bias)
    if invention:
        facts += invention_facts(limits)
    constants = {**limits.as_constants(), **cfg.as_constants(), "climit": climit,
                 "sigorder": int(signature_ordering_applies(_max_arity(bias, limits, invention)))}
    return EncodingBundle(load_encoding("main"), load_encoding("cost"), load_encoding("redundancy"),
                          load_encoding("invention") if invention else "", tuple(facts), constants)


def _var(term) -> int:
    if not (isinstance(term, Function) and term.name == "v" and len(term.args) == 1
            and isinstance(term.args[0], int)):
        raise DecodeError(f"not a variable term: {render(term)}")
    return term.args[0]


def decode_answer_set(atoms: Iterable[Function]) -> tuple[HypRule, CostBreakdown]:
    """Rebuild the rule and its cost items from one answer set."""
    var_types: dict[int, str] = {}
    heads, hbind, bodies, bbind, costs, totals = [], {}, {}, {}, [], []
    for a in atoms:
        n, args = a.name, a.args
        if n == "use_var_type" and len(args) == 2:
            var_types[_var(args[0])] = render(args[1])
        elif n == "use_head_pred" and len(args) == 3:
            heads.append((render(args[0]), render(args[1]), args[2]))
        elif n == "bind_hvar" and len(args) == 2:
            hbind[args[0]] = _var(args[1])
        elif n == "use_body_pred" and len(args) == 4:
            lid = args[0]
            if not (isinstance(lid, Function) and lid.name == "id_idx" and len(lid.args) == 2):
                raise DecodeError(f"bad literal identifier {render(lid)}")
            bodies[(render(lid), render(args[2]))] = (render(lid.args[0]), lid.args[1],
                                                      render(args[1]), args[3])
        elif n == "bind_bvar" and len(args) == 4:
            bbind.setdefault((render(args[0]), render(args[1])), {})[args[2]] = _var(args[3])
        elif n == "cost" and len(args) == 3:
            costs.append(CostItem(render(args[0]), render(args[1]), args[2]))
        elif n == "totalcost" and len(args) == 1:
            totals.append(args[0])

    if len(heads) != 1:
        raise DecodeError(f"expected exactly one head atom, found {len(heads)}")

    def bound(binding: dict, arity: int, what: str) -> list[HypVar]:
        if sorted(binding) != list(range(1, arity + 1)):
            raise DecodeError(f"arity mismatch for {what}: positions {sorted(binding)}, arity {arity}")
        out = []
        for j in range(1, arity + 1):
            idx = binding[j]
            if idx not in var_types:
                raise DecodeError(f"{what} binds undeclared variable v({idx})")
            out.append(HypVar(idx, var_types[idx]))
        return out

    def schema(ident: str, name: str, args: list[HypVar]) -> PredicateSchema:
        return PredicateSchema(ident, name, tuple(v.type for v in args), invented=ident.startswith("ip("))

    hid, hname, harity = heads[0]
    head_args = bound(hbind, harity, f"head {hname}")
    body = []
    for (lid, pol), (pid, slot, pname, arity) in bodies.items():
        args = bound(bbind.get((lid, pol), {}), arity, f"literal {lid}")
        body.append(HypLiteral(schema(pid, pname, args), POS if pol == "pos" else NEG, slot, tuple(args)))
    extra = set(bbind) - set(bodies)
    if extra:
        raise DecodeError(f"bindings for unused literals: {sorted(extra)}")
    rule = HypRule(schema(hid, hname, head_args), tuple(head_args), tuple(body))
    total = totals[0] if totals else sum(c.cost for c in costs)
    items = tuple(sorted(costs, key=lambda c: (c.name, c.data)))
    return rule, CostBreakdown(items, total)


def generate_space_asp(bias: Bias, limits: HardLimits = HardLimits(), cfg: CostConfig = CostConfig(),
                       climit: int = 6, solver: SolverClient | None = None,
                       invention_enabled: bool = True, time_limit: float | None = None) -> HypothesisSpace:
    """Enumerate all answer sets of the generation program.

    Answer sets that are alpha-variants of each other are merged into their
    canonical representative, and classes without a canonical member are
    dropped. A solver failure or timeout yields the rules
    decoded so far with ``exhaustive=False``.
    """
    start = time.monotonic()
    bundle = emit_encoding(bias, limits, cfg, climit, invention_enabled)
    solver = solver or default_client()
    types = bias.types
    try:
        res = solver.solve(SolveRequest(bundle.program(), Mode.ENUMERATE_ALL, time_limit, bundle.constants))
        models, exhaustive = res.models, res.exhaustive
    except SolverError:
        models, exhaustive = (), False
    seen: dict = {}
    for m in models:
        rule, breakdown = decode_answer_set(m.atoms)
        canon = canonical_form(rule, types, limits.maxvars)
        if not is_canonical(canon, types, limits.maxvars):
            # only possible when signature ordering is off (arity above two)
            continue
        if canon != rule:
            breakdown = rule_cost(canon, cfg, climit)
        seen.setdefault(canon, (canon, breakdown))
    return HypothesisSpace(list(seen.values()), climit, exhaustive, time.monotonic() - start)
