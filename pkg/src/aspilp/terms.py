"""Ground terms and atoms as printed by ASP solvers and competition files.

Terms are plain Python values:

* integers for numbers,
* :class:`Function` for constants (zero arguments), function terms and atoms,
* tuples for tuple terms such as ``(0,1)``,
* :class:`String` for quoted strings.

``parse_term``/``parse_atom`` accept exactly the subset of ASP-Core-2 term
syntax that can appear in ground output, and ``render`` is their inverse.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union


class TermSyntaxError(ValueError):
    """Raised for malformed term text. ``pos`` is a 0-based character offset."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at offset {pos} in {text!r}" if text else message)


@dataclass(frozen=True)
class String:
    value: str

    def __str__(self) -> str:
        escaped = self.value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'


@dataclass(frozen=True)
class Function:
    name: str
    args: tuple = ()
    negative: bool = False

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def predicate(self) -> str:
        return self.name

    def __str__(self) -> str:
        return render(self)


Term = Union[int, Function, tuple, String]
GroundAtom = Function

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>-?\d+)
  | (?P<special>\#(?:inf|sup))
  | (?P<ident>-?_*[a-z][A-Za-z0-9_']*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>[(),])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise TermSyntaxError("unexpected end of input", self.text, len(self.text))
        self.i += 1
        return tok

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def term(self) -> Term:
        kind, val, pos = self.next()
        if kind == "num":
            return int(val)
        if kind == "string":
            return String(_unescape(val[1:-1]))
        if kind == "special":
            return Function(val)
        if kind == "ident":
            negative = val.startswith("-")
            name = val[1:] if negative else val
            args: tuple = ()
            nxt = self.peek()
            if nxt is not None and nxt[1] == "(":
                self.next()
                items, trailing = self.arguments(pos)
                if trailing:
                    raise TermSyntaxError(f"trailing comma in arguments of {name}", self.text, pos)
                args = tuple(items)
            return Function(name, args, negative)
        if val == "(":
            items, trailing = self.arguments(pos)
            if len(items) == 1 and not trailing:
                # parenthesized term, not a tuple
                return items[0]
            return tuple(items)
        raise TermSyntaxError(f"unexpected {val!r}", self.text, pos)

    def arguments(self, open_pos: int) -> tuple[list, bool]:
        """Parse ``t1,...,tn)`` after an opening parenthesis.

        Returns the items and whether a trailing comma closed the list, which
        marks a one-element tuple ``(t,)``.
        """
        items: list = []
        nxt = self.peek()
        if nxt is None:
            raise TermSyntaxError("unbalanced parentheses", self.text, open_pos)
        if nxt[1] == ")":
            self.next()
            return items, False
        while True:
            nxt = self.peek()
            if nxt is None:
                raise TermSyntaxError("unbalanced parentheses", self.text, open_pos)
            if nxt[1] in ",)":
                raise TermSyntaxError("empty argument", self.text, nxt[2])
            items.append(self.term())
            nxt = self.peek()
            if nxt is None:
                raise TermSyntaxError("unbalanced parentheses", self.text, open_pos)
            self.next()
            if nxt[1] == ")":
                return items, False
            if nxt[1] != ",":
                raise TermSyntaxError(f"expected ',' or ')', got {nxt[1]!r}", self.text, nxt[2])
            after = self.peek()
            if after is not None and after[1] == ")":
                self.next()
                return items, True


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", lambda m: "\n" if m.group(1) == "n" else m.group(1), s)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    if p.at_end():
        raise TermSyntaxError("empty term", text, 0)
    t = p.term()
    if not p.at_end():
        raise TermSyntaxError("trailing input", text, p.peek()[2])
    return t


def parse_atom(text: str) -> Function:
    """Parse one ground atom; a single trailing ``.`` is allowed."""
    stripped = text.strip()
    if stripped.endswith("."):
        stripped = stripped[:-1]
    t = parse_term(stripped)
    if not isinstance(t, Function) or t.name.startswith("#"):
        raise TermSyntaxError("not an atom", text, 0)
    return t


def parse_ground_atom(text: str) -> Function:
    return parse_atom(text)


def parse_atoms(text: str) -> list[Function]:
    """Parse a whitespace-separated sequence of atoms, as in a solver's answer line."""
    p = _Parser(text)
    out = []
    while not p.at_end():
        t = p.term()
        if not isinstance(t, Function):
            raise TermSyntaxError("not an atom", text, 0)
        out.append(t)
    return out


def split_statements(text: str) -> Iterator[str]:
    """Split ``a(1). b((0,1),2).`` into statements at top-level periods."""
    depth = 0
    start = 0
    in_string = False
    i = 0
    while i < len(text):
        c = text[i]
        if in_string:
            if c == "\\":
                i += 1
            elif c == '"':
                in_string = False
        elif c == '"':
            in_string = True
        elif c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "." and depth == 0:
            # ``..`` is an interval, not a terminator
            if text[i + 1:i + 2] == "." or (i > 0 and text[i - 1] == "."):
                i += 1
                continue
            stmt = text[start:i].strip()
            if stmt:
                yield stmt
            start = i + 1
        i += 1
    rest = text[start:].strip()
    if rest:
        yield rest


def render(term: Term) -> str:
    if isinstance(term, bool):
        raise TypeError("booleans are not terms")
    if isinstance(term, int):
        return str(term)
    if isinstance(term, String):
        return str(term)
    if isinstance(term, tuple):
        inner = ",".join(render(t) for t in term)
        return f"({inner},)" if len(term) == 1 else f"({inner})"
    if isinstance(term, Function):
        sign = "-" if term.negative else ""
        if not term.args:
            return sign + term.name
        return f"{sign}{term.name}({','.join(render(t) for t in term.args)})"
    raise TypeError(f"not a term: {term!r}")


def term_key(term: Term):
    """Total order on terms: numbers < functions/tuples < strings.

    Functions are compared by arity, then name, then arguments; tuples behave
    like functions with an empty name.
    """
    if isinstance(term, int):
        return (0, term)
    if isinstance(term, tuple):
        return (1, len(term), "", tuple(term_key(t) for t in term), False)
    if isinstance(term, Function):
        return (1, len(term.args), term.name, tuple(term_key(t) for t in term.args), term.negative)
    if isinstance(term, String):
        return (2, term.value)
    raise TypeError(f"not a term: {term!r}")
