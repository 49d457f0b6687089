"""Mode bias: typed predicate schemas and their fact representation."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

_SCHEMA = re.compile(r"^\s*([a-z][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*\.?\s*$")
_NAME = re.compile(r"^[a-z][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class PredicateSchema:
    """A typed predicate such as ``valid_move(cell,time)``.

    ``id`` is the identifier used in the encodings (``t1``, ``r1``...,
    ``ip(1)`` for invented predicates).
    """

    id: str
    name: str
    arg_types: tuple[str, ...] = ()
    invented: bool = False

    def __post_init__(self):
        object.__setattr__(self, "arg_types", tuple(self.arg_types))

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    def __str__(self) -> str:
        if not self.arg_types:
            return self.name
        return f"{self.name}({','.join(self.arg_types)})"


def parse_schema(text: str, ident: str) -> PredicateSchema:
    m = _SCHEMA.match(text)
    if m is None:
        raise ValueError(f"malformed predicate declaration {text!r}")
    name, args = m.group(1), m.group(2)
    types: tuple[str, ...] = ()
    if args is not None and args.strip():
        types = tuple(a.strip() for a in args.split(","))
        for t in types:
            if not _NAME.match(t):
                raise ValueError(f"bad argument type {t!r} in {text!r} (bias arguments must be type names)")
    return PredicateSchema(ident, name, types)


TypeTable = dict  # type name -> type id


def assign_type_ids(target: PredicateSchema, relevant: Sequence[PredicateSchema]) -> TypeTable:
    """Number types by first appearance: target arguments, then relevant predicates in order."""
    table: dict[str, int] = {}
    for schema in (target, *relevant):
        for t in schema.arg_types:
            if t not in table:
                table[t] = len(table)
    return table


@dataclass(frozen=True)
class Bias:
    target: PredicateSchema
    relevant: tuple[PredicateSchema, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relevant", tuple(self.relevant))
        ids = [self.target.id] + [r.id for r in self.relevant]
        if len(set(ids)) != len(ids):
            raise ValueError(f"predicate ids must be unique, got {ids}")

    @classmethod
    def from_strings(cls, target: str, relevant: Sequence[str]) -> "Bias":
        return cls(parse_schema(target, "t1"),
                   tuple(parse_schema(r, f"r{i}") for i, r in enumerate(relevant, start=1)))

    @property
    def types(self) -> TypeTable:
        return assign_type_ids(self.target, self.relevant)

    @property
    def max_arity(self) -> int:
        return max([self.target.arity] + [r.arity for r in self.relevant])

    def schema(self, ident: str) -> PredicateSchema:
        for s in (self.target, *self.relevant):
            if s.id == ident:
                return s
        raise KeyError(ident)

    def without(self, name: str) -> "Bias":
        """Drop a relevant predicate by name; remaining ids are renumbered."""
        kept = [r for r in self.relevant if r.name != name]
        return Bias(self.target, tuple(PredicateSchema(f"r{i}", r.name, r.arg_types)
                                       for i, r in enumerate(kept, start=1)))


def emit_bias_facts(bias: Bias, table: TypeTable | None = None) -> list[str]:
    table = bias.types if table is None else table
    facts = []
    t = bias.target
    facts.append(f"tpred({t.id},{t.name},{t.arity}).")
    facts.extend(f"targ({t.id},{j},{ty})." for j, ty in enumerate(t.arg_types, start=1))
    for r in bias.relevant:
        facts.append(f"rpred({r.id},{r.name},{r.arity}).")
        facts.extend(f"rarg({r.id},{j},{ty})." for j, ty in enumerate(r.arg_types, start=1))
    used = [ty for s in (t, *bias.relevant) for ty in s.arg_types]
    missing = sorted(set(used) - set(table))
    if missing:
        raise KeyError(f"types missing from type table: {missing}")
    for ty, ident in sorted(table.items(), key=lambda kv: kv[1]):
        facts.append(f"type_id({ty},{ident}).")
    return facts
