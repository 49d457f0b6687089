"""Run an external ASP solver (clingo) as a subprocess.

The solver command is taken from ``$ASPILP_CLINGO`` (split like a shell
command line), then a ``clingo`` executable on ``PATH``, then the ``clingo``
Python module run as ``python -m clingo``. Extra flags can be given in
``$ASPILP_CLINGO_ARGS``.
"""
from __future__ import annotations

import json
import math
import os
import shlex
import shutil
import signal
import subprocess
import sys
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .terms import Function, TermSyntaxError, parse_atom, parse_atoms, render


class SolverError(RuntimeError):
    """The solver could not be run or reported an error."""

    def __init__(self, message: str, stderr: str = ""):
        self.stderr = stderr
        super().__init__(message)


class SolverNotFound(SolverError):
    pass


class SolverCrashed(SolverError):
    """Abnormal exit or an error reported by the solver (e.g. a syntax error)."""


class SolverOutputError(SolverError):
    """The solver's output could not be parsed."""


class Mode(str, Enum):
    ENUMERATE_ALL = "enumerate_all"
    OPTIMIZE = "optimize"
    SAT_ONE = "sat_one"


class Status(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SolveRequest:
    program: str
    mode: Mode = Mode.SAT_ONE
    time_limit: float | None = None  # seconds, None for unbounded
    constants: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.program.strip():
            raise ValueError("program must be nonempty")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass(frozen=True)
class Model:
    atoms: frozenset
    cost: tuple[int, ...] | None = None

    def symbols(self, name: str, arity: int | None = None) -> list[Function]:
        return sorted((a for a in self.atoms if a.name == name and (arity is None or a.arity == arity)),
                      key=render)


@dataclass(frozen=True)
class SolveResult:
    models: tuple[Model, ...]
    status: Status
    exhaustive: bool
    wall_time: float
    timed_out: bool = False
    cancelled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if self.status is Status.UNSAT and self.models:
            raise ValueError("an unsatisfiable result cannot carry models")
        if self.exhaustive and self.status is Status.UNKNOWN:
            raise ValueError("an exhaustive result must be SAT or UNSAT")

    @property
    def best(self) -> Model | None:
        """The last model, which in optimization mode is the best one found."""
        return self.models[-1] if self.models else None


@dataclass
class _Parsed:
    models: list[Model]
    result: str  # SATISFIABLE, UNSATISFIABLE, OPTIMUM FOUND, UNKNOWN
    more: bool | None = None
    optimum: bool | None = None
    time_limit: bool = False
    interrupted: bool = False


def parse_json_output(text: str) -> _Parsed:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SolverOutputError(f"solver output is not valid JSON: {exc}") from None
    try:
        calls = data.get("Call") or [{}]
        models = []
        for w in calls[-1].get("Witnesses", []):
            atoms = frozenset(parse_atom(a) for a in w.get("Value", []))
            cost = tuple(w["Costs"]) if "Costs" in w else None
            models.append(Model(atoms, cost))
        info = data.get("Models", {})
        more = {"yes": True, "no": False}.get(info.get("More"))
        optimum = {"yes": True, "no": False}.get(info.get("Optimum"))
        return _Parsed(models, data.get("Result", "UNKNOWN"), more, optimum,
                       bool(data.get("TIME LIMIT")), bool(data.get("INTERRUPTED")))
    except (AttributeError, KeyError, TypeError, TermSyntaxError) as exc:
        raise SolverOutputError(f"unexpected solver output structure: {exc}") from None


_RESULTS = ("SATISFIABLE", "UNSATISFIABLE", "OPTIMUM FOUND", "UNKNOWN")


def parse_text_output(text: str) -> _Parsed:
    """Parse clingo's default line-oriented output."""
    lines = text.splitlines()
    models: list[Model] = []
    result = "UNKNOWN"
    more = optimum = None
    time_limit = interrupted = False
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if line.startswith("Answer:"):
            atoms_line = lines[i + 1] if i + 1 < len(lines) else ""
            try:
                atoms = frozenset(parse_atoms(atoms_line))
            except TermSyntaxError as exc:
                raise SolverOutputError(f"bad answer line {atoms_line!r}: {exc}") from None
            models.append(Model(atoms))
            i += 2
            continue
        if line.startswith("Optimization:") and models:
            costs = tuple(int(x) for x in line.split(":", 1)[1].split())
            models[-1] = Model(models[-1].atoms, costs)
        elif line in _RESULTS:
            result = line
        elif line.startswith("Models"):
            more = line.rstrip().endswith("+")
        elif line.startswith("Optimum") and ":" in line:
            optimum = line.split(":", 1)[1].strip() == "yes"
        elif line.startswith("TIME LIMIT"):
            time_limit = True
        elif line.startswith("INTERRUPTED") or "INTERRUPTED by signal" in line:
            interrupted = True
        i += 1
    return _Parsed(models, result, more, optimum, time_limit, interrupted)


def _stderr_has_error(stderr: str) -> bool:
    return any(("*** ERROR" in line or ": error:" in line) for line in stderr.splitlines())


def resolve_command() -> list[str]:
    env = os.environ.get("ASPILP_CLINGO")
    if env:
        return shlex.split(env)
    exe = shutil.which("clingo")
    if exe:
        return [exe]
    return [sys.executable, "-m", "clingo"]


class SolverClient:
    """Submit programs to the solver. Safe for concurrent use: every call owns
    its own subprocess."""

    def __init__(self, command: Sequence[str] | None = None, extra_args: Sequence[str] = (),
                 output: str = "json", kill_grace: float = 1.0):
        self.command = list(command) if command else resolve_command()
        env_args = shlex.split(os.environ.get("ASPILP_CLINGO_ARGS", ""))
        self.extra_args = list(extra_args) + env_args
        if output not in ("json", "text"):
            raise ValueError("output must be 'json' or 'text'")
        self.output = output
        self.kill_grace = kill_grace

    def arguments(self, req: SolveRequest) -> list[str]:
        args = ["--outf=2" if self.output == "json" else "--outf=0"]
        if req.mode is Mode.ENUMERATE_ALL:
            args.append("0")
        elif req.mode is Mode.OPTIMIZE:
            args += ["--opt-mode=opt", "0"]
        else:
            args.append("1")
        if req.time_limit is not None:
            args.append(f"--time-limit={max(1, math.ceil(req.time_limit))}")
        for name, value in sorted(req.constants.items()):
            args += ["-c", f"{name}={value}"]
        return args + self.extra_args

    def solve(self, req: SolveRequest, cancel: threading.Event | None = None) -> SolveResult:
        """Run one request. Setting ``cancel`` kills the solver's process group."""
        cmd = self.command + self.arguments(req)
        start = time.monotonic()
        try:
            proc = subprocess.Popen(cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                    stderr=subprocess.PIPE, text=True, start_new_session=True)
        except FileNotFoundError:
            raise SolverNotFound(f"solver executable not found: {self.command[0]}") from None
        deadline = None if req.time_limit is None else start + req.time_limit + self.kill_grace
        killed = cancelled = False
        pending_input: str | None = req.program
        while True:
            try:
                stdout, stderr = proc.communicate(pending_input, timeout=0.05)
                break
            except subprocess.TimeoutExpired:
                pending_input = None
            if cancel is not None and cancel.is_set():
                cancelled = True
            if cancelled or (deadline is not None and time.monotonic() > deadline):
                _kill_group(proc)
                killed = True
                stdout, stderr = proc.communicate()
                break
        wall = time.monotonic() - start

        if killed:
            try:
                parsed = self._parse(stdout)
                models = parsed.models
            except SolverError:
                models = []
            status = Status.SAT if models else Status.UNKNOWN
            return SolveResult(tuple(models), status, False, wall, timed_out=not cancelled,
                               cancelled=cancelled)

        if proc.returncode < 0 or proc.returncode & (32 | 64 | 128):
            raise SolverCrashed(f"solver exited abnormally with code {proc.returncode}: "
                                f"{stderr.strip()[-2000:]}", stderr)
        try:
            parsed = self._parse(stdout)
        except SolverOutputError as exc:
            if _stderr_has_error(stderr):
                raise SolverCrashed(f"solver reported an error: {stderr.strip()[-2000:]}", stderr) from None
            raise SolverOutputError(str(exc), stderr) from None
        stopped = parsed.time_limit or parsed.interrupted
        if not stopped and _stderr_has_error(stderr):
            raise SolverCrashed(f"solver reported an error: {stderr.strip()[-2000:]}", stderr)
        return self._result(req, parsed, wall, stopped)

    def _parse(self, stdout: str) -> _Parsed:
        return parse_json_output(stdout) if self.output == "json" else parse_text_output(stdout)

    @staticmethod
    def _result(req: SolveRequest, parsed: _Parsed, wall: float, stopped: bool) -> SolveResult:
        models = tuple(parsed.models)
        if parsed.result == "UNSATISFIABLE" and not models:
            return SolveResult((), Status.UNSAT, not stopped, wall, timed_out=parsed.time_limit)
        status = Status.SAT if models else Status.UNKNOWN
        if stopped or status is Status.UNKNOWN:
            exhaustive = False
        elif req.mode is Mode.ENUMERATE_ALL:
            exhaustive = parsed.more is False
        elif req.mode is Mode.OPTIMIZE:
            # without weak constraints every model is optimal
            exhaustive = (parsed.result == "OPTIMUM FOUND" or parsed.optimum is True
                          or (models[-1].cost is None and parsed.more is False))
        else:
            exhaustive = True
        return SolveResult(models, status, exhaustive, wall, timed_out=parsed.time_limit)


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


_default: SolverClient | None = None
_default_lock = threading.Lock()


def default_client() -> SolverClient:
    global _default
    with _default_lock:
        if _default is None:
            _default = SolverClient()
        return _default
