"""Hypothesis rule candidates, their cost model and canonical form.

A rule uses typed variables ``V<index>``. For a type with id ``tid`` the
variables are numbered contiguously from ``(tid+1)*(maxvars+1)``, so with the
default ``maxvars=4`` the ``cell`` variables (id 0) are V5..V8 and the ``time``
variables (id 1) are V10..V13. Every used variable contributes an implicit
domain literal ``<type>(V<index>)`` when the rule is rendered.
"""
from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .bias import PredicateSchema, TypeTable

POS = "pos"
NEG = "neg"


@dataclass(frozen=True)
class HardLimits:
    maxvars: int = 4
    maxuseppred: int = 2
    maxusenpred: int = 2
    maxliterals: int = 4
    maxinventpred: int = 1
    inv_minarity: int = 2
    inv_maxarity: int = 2

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be nonnegative")
        if self.inv_minarity > self.inv_maxarity:
            raise ValueError("inv_minarity must not exceed inv_maxarity")

    def as_constants(self) -> dict[str, int]:
        return asdict(self)


@dataclass(frozen=True)
class CostConfig:
    free_vars: int = 2
    cost_vars: int = 1
    cost_type_usedmorethantwice: int = 2
    cost_posbodyliteral: int = 1
    cost_negbodyliteral: int = 2
    cost_pred_multi: int = 2
    cost_varonlyhead: int = 5
    cost_varonlyoncebody: int = 5
    cost_var_boundmorethantwice: int = 2
    cost_reflexive: int = 5
    cost_inv: int = 2
    cost_inv_pred: int = 2
    cost_inv_headbody: int = 3
    cost_inv_bodymulti: int = 5
    cost_inv_headbodyorder: int = 5

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be nonnegative")

    def as_constants(self) -> dict[str, int]:
        return asdict(self)

    @classmethod
    def zero(cls) -> "CostConfig":
        return cls(**{f.name: 0 for f in fields(cls)})


def var_index(type_id: int, k: int, maxvars: int) -> int:
    """Global index of the k-th (1-based) variable of a type."""
    return (type_id + 1) * (maxvars + 1) + k - 1


@dataclass(frozen=True, order=True)
class HypVar:
    index: int
    type: str

    @property
    def name(self) -> str:
        return f"V{self.index}"

    @property
    def term(self) -> str:
        return f"v({self.index})"


def _id_key(ident: str):
    m = re.match(r"^([a-z_]+)\(?(\d+)\)?$", ident)
    if m:
        return (m.group(1), int(m.group(2)))
    return (ident, 0)


def _pol_rank(polarity: str) -> int:
    return 0 if polarity == POS else 1


@dataclass(frozen=True)
class HypLiteral:
    pred: PredicateSchema
    polarity: str
    slot: int
    args: tuple[HypVar, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if self.polarity not in (POS, NEG):
            raise ValueError(f"bad polarity {self.polarity!r}")
        if len(self.args) != self.pred.arity:
            raise ValueError(f"{self.pred.name} expects {self.pred.arity} arguments, got {len(self.args)}")
        for v, t in zip(self.args, self.pred.arg_types):
            if v.type != t:
                raise ValueError(f"variable {v.name} of type {v.type} bound to {t} argument of {self.pred.name}")

    @property
    def predicate_id(self) -> str:
        return self.pred.id

    @property
    def predicate(self) -> str:
        return self.pred.name

    @property
    def ident(self) -> str:
        """The literal identifier term ``id_idx(Id,Slot)``."""
        return f"id_idx({self.pred.id},{self.slot})"

    @property
    def signature(self) -> tuple[int, ...]:
        return tuple(v.index for v in self.args)

    def render(self) -> str:
        atom = self.pred.name
        if self.args:
            atom += "(" + ",".join(v.name for v in self.args) + ")"
        return atom if self.polarity == POS else "not " + atom

    def sort_key(self):
        return (_pol_rank(self.polarity), _id_key(self.pred.id), self.slot)


@dataclass(frozen=True)
class HypRule:
    head: PredicateSchema
    head_args: tuple[HypVar, ...]
    body: tuple[HypLiteral, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "head_args", tuple(self.head_args))
        object.__setattr__(self, "body", tuple(sorted(self.body, key=HypLiteral.sort_key)))
        if len(self.head_args) != self.head.arity:
            raise ValueError(f"head {self.head.name} expects {self.head.arity} arguments")
        for v, t in zip(self.head_args, self.head.arg_types):
            if v.type != t:
                raise ValueError(f"variable {v.name} of type {v.type} bound to {t} head argument")
        keys = [(lit.pred.id, lit.polarity, lit.slot) for lit in self.body]
        if len(set(keys)) != len(keys):
            raise ValueError("two body literals share predicate, polarity and slot")
        types = {}
        for v in self.vars:
            if types.setdefault(v.index, v.type) != v.type:
                raise ValueError(f"variable V{v.index} used with two types")

    @cached_property
    def vars(self) -> frozenset[HypVar]:
        out = set(self.head_args)
        for lit in self.body:
            out.update(lit.args)
        return frozenset(out)

    @property
    def invented(self) -> list[PredicateSchema]:
        seen = {}
        for p in [self.head] + [lit.pred for lit in self.body]:
            if p.invented:
                seen.setdefault(p.id, p)
        return sorted(seen.values(), key=lambda p: _id_key(p.id))

    def __str__(self) -> str:
        return render_rule(self)


def render_rule(rule: HypRule, extra: Iterable[str] = ()) -> str:
    head = rule.head.name
    if rule.head_args:
        head += "(" + ",".join(v.name for v in rule.head_args) + ")"
    domain = [f"{v.type}({v.name})" for v in sorted(rule.vars)]
    body = domain + [lit.render() for lit in rule.body] + list(extra)
    if not body:
        return head + "."
    return f"{head} :- {', '.join(body)}."


# ---------------------------------------------------------------- cost model


@dataclass(frozen=True)
class CostItem:
    name: str
    data: str
    cost: int


@dataclass(frozen=True)
class CostBreakdown:
    items: tuple[CostItem, ...]
    total: int

    @property
    def raw_total(self) -> int:
        return sum(i.cost for i in self.items)

    def by_name(self) -> Counter:
        c: Counter = Counter()
        for i in self.items:
            c[i.name] += i.cost
        return c


def rule_cost(rule: HypRule, cfg: CostConfig = CostConfig(), climit: int | None = None) -> CostBreakdown:
    """Itemized cost of a rule; ``total`` is clamped at ``climit`` when given."""
    items: list[CostItem] = []
    add = lambda name, data, cost: items.append(CostItem(name, str(data), cost))

    used = rule.vars
    n = len(used)
    if n > cfg.free_vars:
        add("vars", n, (n - cfg.free_vars) * cfg.cost_vars)
    per_type = Counter(v.type for v in used)
    for ty in sorted(per_type):
        if per_type[ty] > 2:
            add("vartype_morethantwice", ty, (per_type[ty] - 2) * cfg.cost_type_usedmorethantwice)

    groups: dict[tuple[str, str], list[HypLiteral]] = {}
    for lit in rule.body:
        if lit.polarity == POS:
            add("posbodyliteral", lit.ident, cfg.cost_posbodyliteral)
        else:
            add("negbodyliteral", lit.ident, cfg.cost_negbodyliteral)
        groups.setdefault((lit.pred.id, lit.polarity), []).append(lit)
    for (_, pol), lits in sorted(groups.items()):
        for lit in sorted(lits, key=lambda l: l.slot)[1:]:
            add("pred_multi", f"({lit.ident},{pol})", cfg.cost_pred_multi)

    head_vars = set(rule.head_args)
    occurrences = Counter()  # number of literals (head counts as one) containing a variable
    for v in head_vars:
        occurrences[v] += 1
    body_lits = Counter()
    for lit in rule.body:
        for v in set(lit.args):
            occurrences[v] += 1
            body_lits[v] += 1
    for v in sorted(used):
        if v in head_vars and body_lits[v] == 0:
            add("varonlyhead", v.term, cfg.cost_varonlyhead)
        if v not in head_vars and body_lits[v] == 1:
            add("varonlyoncebody", v.term, cfg.cost_varonlyoncebody)
        if occurrences[v] > 2:
            add("var_boundmorethantwice", v.term, cfg.cost_var_boundmorethantwice)
    for lit in rule.body:
        if lit.pred.arity == 2 and lit.args[0] == lit.args[1]:
            add("reflexive", f"({lit.ident},{lit.polarity})", cfg.cost_reflexive)

    invented = rule.invented
    if invented:
        add("inv", "any", cfg.cost_inv)
        for p in invented:
            add("inv_pred", p.id, cfg.cost_inv_pred)
        body_inv = [lit.pred for lit in rule.body if lit.pred.invented]
        if rule.head.invented and any(p.id == rule.head.id for p in body_inv):
            add("inv_headbody", rule.head.id, cfg.cost_inv_headbody)
        if len(body_inv) >= 2:
            add("inv_bodymulti", "any", cfg.cost_inv_bodymulti)
        if rule.head.invented:
            for p in {p.id: p for p in body_inv}.values():
                if p.id != rule.head.id and rule.head.name >= p.name:
                    add("inv_headbodyorder", f"({rule.head.id},{p.id})", cfg.cost_inv_headbodyorder)

    total = sum(i.cost for i in items)
    if climit is not None:
        total = min(total, climit)
    return CostBreakdown(tuple(sorted(items, key=lambda i: (i.name, i.data))), total)


# ------------------------------------------------------------ canonical form


def signature_ordering_applies(max_arity: int) -> bool:
    """Signature-ordering constraints are only defined for arities one and two."""
    return max_arity <= 2


def _logical_key(rule: HypRule):
    return (tuple(v.index for v in rule.head_args),
            tuple(sorted((_pol_rank(l.polarity), _id_key(l.pred.id), l.signature) for l in rule.body)))


def normalize_slots(rule: HypRule) -> HypRule:
    """Reassign slot indices so that, per predicate and polarity, they follow
    the order of the literals' variable signatures."""
    groups: dict[tuple[str, str], list[HypLiteral]] = {}
    for lit in rule.body:
        groups.setdefault((lit.pred.id, lit.polarity), []).append(lit)
    body = []
    for lits in groups.values():
        for slot, lit in enumerate(sorted(lits, key=lambda l: l.signature), start=1):
            body.append(HypLiteral(lit.pred, lit.polarity, slot, lit.args))
    return HypRule(rule.head, rule.head_args, tuple(body))


def rename(rule: HypRule, mapping: Mapping[HypVar, HypVar]) -> HypRule:
    m = lambda v: mapping.get(v, v)
    return HypRule(rule.head, tuple(m(v) for v in rule.head_args),
                   tuple(HypLiteral(l.pred, l.polarity, l.slot, tuple(m(v) for v in l.args))
                         for l in rule.body))


def _first_occurrence_renaming(rule: HypRule, types: TypeTable, maxvars: int) -> dict[HypVar, HypVar]:
    counters = Counter()
    mapping: dict[HypVar, HypVar] = {}
    order = list(rule.head_args) + [v for lit in rule.body for v in lit.args]
    for v in order:
        if v not in mapping:
            counters[v.type] += 1
            mapping[v] = HypVar(var_index(types[v.type], counters[v.type], maxvars), v.type)
    return mapping


def alpha_variants(rule: HypRule, types: TypeTable, maxvars: int) -> Iterator[HypRule]:
    """All renamings that keep head variables numbered by first occurrence,
    with slots normalized. Every alpha-variant that satisfies the head and
    prefix conditions is produced."""
    base = rename(rule, _first_occurrence_renaming(rule, types, maxvars))
    head_vars = set(base.head_args)
    free_by_type: dict[str, list[HypVar]] = {}
    for v in sorted(base.vars - head_vars):
        free_by_type.setdefault(v.type, []).append(v)
    type_names = sorted(free_by_type)
    perms = [list(itertools.permutations(free_by_type[t])) for t in type_names]
    for choice in itertools.product(*perms):
        mapping = {}
        for t, image in zip(type_names, choice):
            mapping.update(zip(free_by_type[t], image))
        yield normalize_slots(rename(base, mapping))


def canonical_form(rule: HypRule, types: TypeTable, maxvars: int) -> HypRule:
    """The representative of the rule's alpha-equivalence class."""
    return min(alpha_variants(rule, types, maxvars), key=_logical_key)


def alpha_key(rule: HypRule, types: TypeTable, maxvars: int):
    """Hashable identity of the alpha-equivalence class."""
    return (rule.head.id, _logical_key(canonical_form(rule, types, maxvars)))


def canonical_violations(rule: HypRule, types: TypeTable, maxvars: int = 4) -> list[str]:
    """Names of the canonical-form conditions the rule breaks (empty if canonical).

    C1 variables of each type form the lowest-index prefix; C2 slots of each
    predicate/polarity form a prefix; C3 the head binds the lowest variables,
    strictly increasing over same-type argument positions (so no variable
    repeats in the head); C4 slots follow variable signatures; C5 no
    repeated atom in the body; C6 invented predicates numbered from one without
    gaps, with argument types sorted by type id;
    C7 the rule is the chosen representative among its alpha-variants.
    """
    out = []
    by_type: dict[str, list[int]] = {}
    for v in rule.vars:
        by_type.setdefault(v.type, []).append(v.index)
    for ty, idx in by_type.items():
        if ty not in types:
            out.append("C1")
            break
        expected = [var_index(types[ty], k, maxvars) for k in range(1, len(idx) + 1)]
        if sorted(idx) != expected:
            out.append("C1")
            break

    groups: dict[tuple[str, str], list[HypLiteral]] = {}
    for lit in rule.body:
        groups.setdefault((lit.pred.id, lit.polarity), []).append(lit)
    if any(sorted(l.slot for l in lits) != list(range(1, len(lits) + 1)) for lits in groups.values()):
        out.append("C2")

    head_by_type: dict[str, list[int]] = {}
    for v in rule.head_args:
        head_by_type.setdefault(v.type, []).append(v.index)
    for ty, seq in head_by_type.items():
        lowest = [var_index(types.get(ty, 0), k, maxvars) for k in range(1, len(seq) + 1)]
        if seq != lowest:
            out.append("C3")
            break

    for lits in groups.values():
        ordered = sorted(lits, key=lambda l: l.slot)
        sigs = [l.signature for l in ordered]
        if any(a >= b for a, b in zip(sigs, sigs[1:])):
            out.append("C4")
            break

    atoms = [(l.pred.id, l.signature) for l in rule.body]
    if len(set(atoms)) != len(atoms):
        out.append("C5")

    invented = rule.invented
    numbers = [_id_key(p.id)[1] for p in invented]
    if numbers != list(range(1, len(numbers) + 1)):
        out.append("C6")
    else:
        for p in invented:
            ids = [types.get(t, -1) for t in p.arg_types]
            if ids != sorted(ids):
                out.append("C6")
                break

    if not out and rule != canonical_form(rule, types, maxvars):
        out.append("C7")
    return out


def is_canonical(rule: HypRule, types: TypeTable, maxvars: int = 4) -> bool:
    return not canonical_violations(rule, types, maxvars)


# ---------------------------------------------------------- hypothesis space


@dataclass
class HypothesisSpace:
    """Candidate rules with cost strictly below ``climit``, sorted by (cost, text)."""

    entries: list[tuple[HypRule, CostBreakdown]]
    climit: int
    exhaustive: bool = True
    seconds: float = 0.0
    texts: list[str] = field(init=False, repr=False)

    def __post_init__(self):
        decorated = sorted((((bd.total, render_rule(r)), r, bd) for r, bd in self.entries),
                           key=lambda d: d[0])
        self.entries = [(r, bd) for _, r, bd in decorated]
        self.texts = [key[1] for key, _, _ in decorated]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def rules(self) -> list[HypRule]:
        return [r for r, _ in self.entries]

    def rendered(self) -> set[tuple[str, int]]:
        return {(t, bd.total) for t, (_, bd) in zip(self.texts, self.entries)}

    def lines(self) -> list[str]:
        return [f"{bd.total}\t{t}" for t, (_, bd) in zip(self.texts, self.entries)]

    def by_cost(self) -> Counter:
        return Counter(bd.total for _, bd in self.entries)
