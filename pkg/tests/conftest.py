from pathlib import Path

import pytest

from aspilp.bias import Bias
from aspilp.instance import load_instance
from aspilp.rules import NEG, POS, HypLiteral, HypRule, HypVar
from aspilp.solver import SolverClient

DATA = Path(__file__).parent / "data"

GRID_TARGET = "valid_move(cell,time)"
GRID_RELEVANT = ["gap(cell)", "agent_at(cell,time)", "h_adjacent(cell,cell)", "v_adjacent(cell,cell)"]


def grid_bias() -> Bias:
    return Bias.from_strings(GRID_TARGET, GRID_RELEVANT)


# cell variables are V5..V8, time variables V10..V13 under maxvars=4
C = {k: HypVar(4 + k, "cell") for k in range(1, 5)}
T = {k: HypVar(9 + k, "time") for k in range(1, 5)}


def lit(bias: Bias, name: str, *args, neg: bool = False, slot: int = 1) -> HypLiteral:
    schema = next(r for r in bias.relevant if r.name == name)
    return HypLiteral(schema, NEG if neg else POS, slot, args)


def target_rule(bias: Bias, *body, head=None) -> HypRule:
    return HypRule(bias.target, head or (C[1], T[1]), body)


@pytest.fixture(scope="session")
def bias():
    return grid_bias()


@pytest.fixture(scope="session")
def solver():
    return SolverClient()


@pytest.fixture(scope="session")
def grid():
    return load_instance(DATA / "grid2x2.las")


@pytest.fixture(scope="session")
def grid_steps():
    return load_instance(DATA / "grid2x2_steps.las")


# one pass/fail line per acceptance criterion in the terminal summary
_CRITERIA: dict[int, list[str]] = {}
CRITERION_OF: dict[str, int] = {}


def pytest_runtest_logreport(report):
    n = CRITERION_OF.get(report.nodeid)
    # a passing setup or teardown says nothing about the criterion
    if n is None or (report.when != "call" and report.passed):
        return
    _CRITERIA.setdefault(n, []).append(report.outcome)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            CRITERION_OF[item.nodeid] = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        outcomes = _CRITERIA[n]
        if "failed" in outcomes:
            verdict = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {n}: {verdict} ({len(outcomes)} checks)")
