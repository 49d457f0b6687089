"""Direct enumeration of the hypothesis space, without a solver.

Used as an oracle for the ASP backend and as a fallback generator. Rules are
built by choosing invented predicate signatures, a head, a multiset of body
literal kinds and then variable bindings in restricted-growth order; partial
assignments are dropped as soon as a lower bound on their cost reaches the
limit.
"""
from __future__ import annotations

import itertools
import time
from collections import Counter
from typing import Iterator

from .bias import Bias, PredicateSchema
from .rules import (NEG, POS, CostConfig, HardLimits, HypLiteral, HypRule, HypothesisSpace, HypVar,
                    canonical_form, is_canonical, rule_cost, var_index)


def invented_signatures(bias: Bias, limits: HardLimits) -> Iterator[tuple[PredicateSchema, ...]]:
    """All tuples of invented predicates ip(1)..ip(k), k ≤ maxinventpred, with
    argument types sorted by type id."""
    types = sorted(bias.types.items(), key=lambda kv: kv[1])
    names = [t for t, _ in types]
    options: list[list[PredicateSchema]] = []
    for k in range(1, limits.maxinventpred + 1):
        opts = []
        for arity in range(limits.inv_minarity, limits.inv_maxarity + 1):
            for combo in itertools.combinations_with_replacement(names, arity):
                opts.append(PredicateSchema(f"ip({k})", f"ip_{k}_{arity}", combo, invented=True))
        options.append(opts)
    yield ()
    for k in range(1, limits.maxinventpred + 1):
        yield from itertools.product(*options[:k])


def _structural_cost(head: PredicateSchema, kinds: list[tuple[PredicateSchema, str, int]],
                     cfg: CostConfig) -> int:
    """Cost items fixed by the head and the body literal counts alone."""
    cost = 0
    for pred, pol, count in kinds:
        cost += count * (cfg.cost_posbodyliteral if pol == POS else cfg.cost_negbodyliteral)
        cost += (count - 1) * cfg.cost_pred_multi
    body_inv = {p.id: p for p, _, _ in kinds if p.invented}
    invented = set(body_inv) | ({head.id} if head.invented else set())
    if invented:
        cost += cfg.cost_inv + len(invented) * cfg.cost_inv_pred
    if head.invented and head.id in body_inv:
        cost += cfg.cost_inv_headbody
    if sum(c for p, _, c in kinds if p.invented) >= 2:
        cost += cfg.cost_inv_bodymulti
    if head.invented:
        cost += cfg.cost_inv_headbodyorder * sum(1 for p in body_inv.values()
                                                 if p.id != head.id and head.name >= p.name)
    return cost


def _body_kinds(preds: list[PredicateSchema], limits: HardLimits):
    """Multisets of (predicate, polarity) with per-kind counts, by size ascending."""
    slots = [(p, POS, limits.maxuseppred) for p in preds] + [(p, NEG, limits.maxusenpred) for p in preds]
    ranges = [range(0, m + 1) for _, _, m in slots]
    found = []
    for counts in itertools.product(*ranges):
        size = sum(counts)
        if size <= limits.maxliterals:
            found.append((size, [(p, pol, c) for (p, pol, _), c in zip(slots, counts) if c]))
    found.sort(key=lambda x: x[0])
    for _, kinds in found:
        yield kinds


def _vars_lower_bound(var_counts: Counter, occurrences: Counter, cfg: CostConfig) -> int:
    n = sum(var_counts.values())
    cost = max(0, n - cfg.free_vars) * cfg.cost_vars
    cost += sum((k - 2) * cfg.cost_type_usedmorethantwice for k in var_counts.values() if k > 2)
    cost += sum(cfg.cost_var_boundmorethantwice for c in occurrences.values() if c > 2)
    return cost


def _rules_for(head: PredicateSchema, kinds, types, limits: HardLimits, cfg: CostConfig,
               climit: int, base_cost: int, prune: bool) -> Iterator[HypRule]:
    # head arguments take the lowest variables of each type, strictly increasing
    var_counts: Counter = Counter()
    head_args = []
    for t in head.arg_types:
        var_counts[t] += 1
        if var_counts[t] > limits.maxvars:
            return
        head_args.append(HypVar(var_index(types[t], var_counts[t], limits.maxvars), t))
    occurrences: Counter = Counter(set(head_args))

    literals = [(p, pol, slot) for p, pol, c in kinds for slot in range(1, c + 1)]
    positions = [(li, t) for li, (p, _, _) in enumerate(literals) for t in p.arg_types]
    bindings: list[HypVar] = []

    def extend(pos: int, reflexive: int) -> Iterator[HypRule]:
        if prune and base_cost + reflexive + _vars_lower_bound(var_counts, occurrences, cfg) >= climit:
            return
        if pos == len(positions):
            body, k = [], 0
            for p, pol, slot in literals:
                body.append(HypLiteral(p, pol, slot, tuple(bindings[k:k + p.arity])))
                k += p.arity
            yield HypRule(head, tuple(head_args), tuple(body))
            return
        li, t = positions[pos]
        start = sum(1 for q in positions[:pos] if q[0] == li)
        candidates = [HypVar(var_index(types[t], k, limits.maxvars), t)
                      for k in range(1, var_counts[t] + 1)]
        if var_counts[t] < limits.maxvars:
            candidates.append(HypVar(var_index(types[t], var_counts[t] + 1, limits.maxvars), t))
        for v in candidates:
            new = v.index == var_index(types[t], var_counts[t] + 1, limits.maxvars)
            if new:
                var_counts[t] += 1
            first_in_lit = v not in bindings[pos - start:pos]
            if first_in_lit:
                occurrences[v] += 1
            bindings.append(v)
            extra = 0
            arity = literals[li][0].arity
            if start + 1 == arity and arity == 2 and bindings[-1] == bindings[-2]:
                extra = cfg.cost_reflexive
            yield from extend(pos + 1, reflexive + extra)
            bindings.pop()
            if first_in_lit:
                occurrences[v] -= 1
                if not occurrences[v]:
                    del occurrences[v]
            if new:
                var_counts[t] -= 1

    yield from extend(0, 0)


def enumerate_space(bias: Bias, limits: HardLimits = HardLimits(), cfg: CostConfig = CostConfig(),
                    climit: int = 6, invention_enabled: bool = True, prune: bool = True) -> HypothesisSpace:
    """All canonical rules with total cost below ``climit``."""
    if climit < 1:
        raise ValueError("climit must be at least 1")
    start = time.monotonic()
    types = bias.types
    signatures = invented_signatures(bias, limits) if invention_enabled else iter([()])
    found: dict[HypRule, tuple] = {}
    for invented in signatures:
        for head in (bias.target, *invented):
            preds = list(bias.relevant) + list(invented)
            for kinds in _body_kinds(preds, limits):
                used = {p.id for p, _, _ in kinds} | {head.id}
                if any(p.id not in used for p in invented):
                    continue
                base = _structural_cost(head, kinds, cfg)
                if prune and base >= climit:
                    continue
                for rule in _rules_for(head, kinds, types, limits, cfg, climit, base, prune):
                    if rule in found:
                        continue
                    canon = canonical_form(rule, types, limits.maxvars)
                    if canon in found or not is_canonical(canon, types, limits.maxvars):
                        continue
                    breakdown = rule_cost(canon, cfg, climit)
                    if breakdown.raw_total < climit:
                        found[canon] = (canon, breakdown)
    return HypothesisSpace(list(found.values()), climit, True, time.monotonic() - start)


def max_rule_cost(bias: Bias, limits: HardLimits = HardLimits(), cfg: CostConfig = CostConfig(),
                  invention_enabled: bool = True) -> int:
    """An upper bound on the cost of any rule within the hard limits.

    Spaces generated with a larger ``climit`` are all equal.
    """
    ntypes = len(bias.types)
    n = ntypes * limits.maxvars
    lits = limits.maxliterals
    cost = max(0, n - cfg.free_vars) * cfg.cost_vars
    cost += ntypes * max(0, limits.maxvars - 2) * cfg.cost_type_usedmorethantwice
    cost += lits * (max(cfg.cost_posbodyliteral, cfg.cost_negbodyliteral) + cfg.cost_pred_multi
                    + cfg.cost_reflexive)
    cost += n * (max(cfg.cost_varonlyhead, cfg.cost_varonlyoncebody) + cfg.cost_var_boundmorethantwice)
    if invention_enabled and limits.maxinventpred > 0:
        k = limits.maxinventpred
        cost += (cfg.cost_inv + k * cfg.cost_inv_pred + cfg.cost_inv_headbody + cfg.cost_inv_bodymulti
                 + k * cfg.cost_inv_headbodyorder)
    return cost
