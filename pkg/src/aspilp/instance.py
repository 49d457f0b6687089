"""Competition instance files and the ``#attempt`` output protocol."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .bias import PredicateSchema, parse_schema
from .terms import Function, TermSyntaxError, parse_atom, render, split_statements


class InstanceParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Verdict(str, Enum):
    VALID = "VALID"
    INVALID = "INVALID"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Example:
    id: int
    trace: frozenset
    valid_moves: frozenset = frozenset()

    def __len__(self) -> int:
        return len(self.trace)


@dataclass(frozen=True)
class TestTrace:
    __test__ = False  # not a pytest class

    id: int
    trace: frozenset

    def __len__(self) -> int:
        return len(self.trace)


@dataclass
class InstanceFile:
    background: list[str]
    target: PredicateSchema
    relevant: list[PredicateSchema]
    examples: list[Example] = field(default_factory=list)
    tests: list[TestTrace] = field(default_factory=list)

    @property
    def background_text(self) -> str:
        return "\n".join(self.background)

    def bias(self):
        from .bias import Bias
        return Bias(self.target, tuple(self.relevant))


_SECTION = re.compile(r"^#(background|target_predicate|relevant_predicates|trace|valid_moves)\b\s*(.*)$")
_BLOCK = re.compile(r"^#(Example|Test)\(\s*(-?\d+)\s*\)\s*$")


def parse_instance(text: str) -> InstanceFile:
    """Parse a competition instance.

    Background lines (including ``%`` comments) are kept verbatim. Every other
    section is parsed; errors carry the 1-based line number.
    """
    background: list[str] = []
    targets: list[tuple[str, int]] = []
    relevant: list[tuple[str, int]] = []
    examples: dict[int, dict] = {}
    tests: dict[int, dict] = {}
    section = None
    block = None  # (kind, id)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = _BLOCK.match(line)
        if m:
            kind, ident = m.group(1), int(m.group(2))
            table = examples if kind == "Example" else tests
            if ident in table:
                raise InstanceParseError(f"duplicate #{kind}({ident})", lineno)
            table[ident] = {"trace": [], "valid_moves": [], "line": lineno}
            block = (kind, ident)
            section = None
            continue
        m = _SECTION.match(line)
        if m:
            name = m.group(1)
            if name in ("trace", "valid_moves"):
                if block is None:
                    raise InstanceParseError(f"#{name} outside of an #Example/#Test block", lineno)
                if block[0] == "Test" and name == "valid_moves":
                    raise InstanceParseError("#valid_moves is not allowed in a #Test block", lineno)
            else:
                block = None
            section = name
            line = raw = m.group(2).strip()
            if not line:
                continue
        elif line.startswith("#") and section != "background":
            raise InstanceParseError(f"unknown section marker {line!r}", lineno)

        if section == "background":
            background.append(raw)
            continue
        if not line or line.startswith("%"):
            continue
        if section is None:
            raise InstanceParseError(f"content outside of any section: {line!r}", lineno)
        if section == "target_predicate":
            targets.extend((s, lineno) for s in split_statements(line))
        elif section == "relevant_predicates":
            relevant.extend((s, lineno) for s in split_statements(line))
        else:
            table = examples if block[0] == "Example" else tests
            for stmt in split_statements(line):
                try:
                    atom = parse_atom(stmt)
                except TermSyntaxError as exc:
                    raise InstanceParseError(f"malformed atom {stmt!r}: {exc}", lineno) from None
                table[block[1]][section].append(atom)

    if not targets:
        raise InstanceParseError("missing #target_predicate")
    if len(targets) > 1:
        raise InstanceParseError("more than one target predicate", targets[1][1])
    target = _schema(targets[0], "t1")
    rel = [_schema(item, f"r{i}") for i, item in enumerate(relevant, start=1)]
    if not rel:
        raise InstanceParseError("missing or empty #relevant_predicates")

    ex_list = []
    for ident, data in examples.items():
        if not data["trace"]:
            raise InstanceParseError(f"#Example({ident}) has an empty trace", data["line"])
        _check_positions(data["trace"], f"#Example({ident})", data["line"])
        ex_list.append(Example(ident, frozenset(data["trace"]), frozenset(data["valid_moves"])))
    test_list = []
    for ident, data in tests.items():
        if not data["trace"]:
            raise InstanceParseError(f"#Test({ident}) has an empty trace", data["line"])
        test_list.append(TestTrace(ident, frozenset(data["trace"])))
    return InstanceFile(background, target, rel, ex_list, test_list)


def _check_positions(trace: list[Function], where: str, lineno: int) -> None:
    times = [a.args[1] for a in trace if a.name == "agent_at" and len(a.args) == 2]
    if len(times) != len(set(times)):
        raise InstanceParseError(f"{where} has two agent_at atoms for one time point", lineno)


def _schema(item: tuple[str, int], ident: str) -> PredicateSchema:
    text, lineno = item
    try:
        return parse_schema(text, ident)
    except ValueError as exc:
        raise InstanceParseError(str(exc), lineno) from None


def load_instance(path) -> InstanceFile:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def render_atoms(atoms: Iterable[Function]) -> list[str]:
    return sorted(render(a) + "." for a in atoms)


def write_attempt(predictions: Sequence[tuple[int, Verdict | str]],
                  tests: Sequence[TestTrace] | None = None) -> str:
    """Format one ``#attempt`` block.

    With ``tests`` given, predictions are checked against the known test ids
    and emitted in test order.
    """
    verdicts = {}
    for ident, verdict in predictions:
        verdicts[int(ident)] = Verdict(verdict)
    order = list(verdicts)
    if tests is not None:
        known = [t.id for t in tests]
        unknown = set(verdicts) - set(known)
        if unknown:
            raise ValueError(f"prediction for unknown test id(s): {sorted(unknown)}")
        order = [i for i in known if i in verdicts]
    lines = ["#attempt"] + [f"{verdicts[i].value}({i})" for i in order]
    return "\n".join(lines) + "\n"
