import io
import json

import pytest

from aspilp.driver import DriverConfig, RunReport, SpaceCache, run, run_batch
from aspilp.instance import Example, InstanceFile, parse_instance
from aspilp.rules import rule_cost
from aspilp.terms import Function

from conftest import DATA


def attempts(report):
    return report.of_kind("attempt")


def shifted(instance: InstanceFile, gap: int = 10) -> InstanceFile:
    """Move each example to its own time window so traces cannot interfere."""
    examples = []
    for k, e in enumerate(instance.examples):
        move = lambda a, d=k * gap: Function(a.name, (a.args[0], a.args[1] + d))
        examples.append(Example(e.id, frozenset(map(move, e.trace)), frozenset(map(move, e.valid_moves))))
    bk = [line.replace("time(0..3).", f"time(0..{gap * len(examples)}).") for line in instance.background]
    return InstanceFile(bk, instance.target, instance.relevant, examples, instance.tests)


def test_config_validation():
    with pytest.raises(ValueError):
        DriverConfig(climit_min=5, climit_max=4)
    with pytest.raises(ValueError):
        DriverConfig(time_limit=0)
    with pytest.raises(ValueError):
        DriverConfig(backend="prolog")
    assert DriverConfig.general().climit_max is None
    assert DriverConfig.competition().climits(None) == range(4, 16)


def test_unbounded_limits_stop(grid):
    rng = DriverConfig.general(invention_enabled=False).climits(grid.bias())
    assert rng.start == 1 and rng.stop > 1


@pytest.mark.parametrize("backend", ["asp", "native"])
def test_fixture_learns_everything(grid, solver, backend):
    out, report = io.StringIO(), RunReport()
    h = run(grid, DriverConfig(backend=backend), out, solver, report)
    assert h is not None and h.quality == 2 and h.complete
    assert len(attempts(report)) == 1
    assert out.getvalue() == "#attempt\nVALID(0)\nINVALID(1)\nINVALID(2)\n"
    # stopped right after the first example
    assert [e["id"] for e in report.of_kind("example")] == [0]


def test_attempts_only_on_strict_improvement(grid_steps, solver):
    report = RunReport()
    h = run(grid_steps, DriverConfig(), io.StringIO(), solver, report)
    assert report.of_kind("start")[0]["examples"] == [1, 0]  # shorter trace first
    qualities = [a["quality"] for a in attempts(report)]
    assert qualities == [1, 2]
    assert h.quality == 2
    hyps = report.of_kind("hypothesis")
    best = 0
    emitted = iter(attempts(report))
    for ev in hyps:
        if ev["quality"] > best:
            best = ev["quality"]
            assert next(emitted)["quality"] == best


def test_stable_order_for_equal_lengths(solver):
    text = (DATA / "grid2x2.las").read_text()
    swapped = text.replace("#Example(0)", "#Example(X)").replace("#Example(1)", "#Example(0)") \
        .replace("#Example(X)", "#Example(1)")
    report = RunReport()
    run(parse_instance(swapped), DriverConfig(), None, solver, report)
    assert report.of_kind("start")[0]["examples"] == [1, 0]


def test_no_examples(grid, solver):
    empty = InstanceFile(grid.background, grid.target, grid.relevant, [], grid.tests)
    out, report = io.StringIO(), RunReport()
    assert run(empty, DriverConfig(), out, solver, report) is None
    assert out.getvalue() == "" and not attempts(report)


def test_rules_respect_climit_max(grid, solver):
    h = run(grid, DriverConfig(climit_min=4, climit_max=4), None, solver)
    assert h is not None
    assert all(rule_cost(r).total < 4 for r in h.rules)


def test_nothing_found_below_climit(grid, solver):
    report = RunReport()
    assert run(grid, DriverConfig(climit_min=1, climit_max=3), None, solver, report) is None
    assert not attempts(report)
    assert report.of_kind("done")[0]["found"] is False


def test_incomplete_result_is_reported(grid, solver):
    ex0 = next(e for e in grid.examples if e.id == 0)
    clash = Example(7, ex0.trace, frozenset())  # same trace, no valid moves
    inst = InstanceFile(grid.background, grid.target, grid.relevant, [ex0, clash], grid.tests)
    report = RunReport()
    h = run(inst, DriverConfig(climit_max=7), None, solver, report)
    assert h is not None and h.quality == 1 and not h.complete
    done = report.of_kind("done")[0]
    assert done["quality"] == 1 and done["examples"] == 2 and done["complete"] is False
    assert [a["quality"] for a in attempts(report)] == [1]


def test_budget(grid, solver):
    report = RunReport()
    assert run(grid, DriverConfig(budget=0.0), None, solver, report) is None
    assert report.of_kind("budget_exhausted")


def test_solver_failure_degrades(grid):
    class Broken:
        def solve(self, req, cancel=None):
            from aspilp.solver import SolverCrashed
            raise SolverCrashed("boom")

    report = RunReport()
    assert run(grid, DriverConfig(climit_max=5), None, Broken(), report) is None
    assert report.of_kind("done")


def test_report_file(grid, solver, tmp_path):
    path = tmp_path / "run.jsonl"
    with RunReport(path) as report:
        run(grid, DriverConfig(), None, solver, report)
    events = [json.loads(line) for line in path.read_text().splitlines()]
    kinds = [e["event"] for e in events]
    assert kinds[0] == "start" and kinds[-1] == "done"
    assert "hypothesis" in kinds and "attempt" in kinds
    done = events[-1]
    assert done["hypothesis"] and done["seconds"] >= 0
    hyp = next(e for e in events if e["event"] == "hypothesis")
    assert hyp["per_example"] == {"0": True, "1": True}


def test_space_cache(grid, solver):
    calls = []

    class Counting:
        def solve(self, req, cancel=None):
            calls.append(req)
            return solver.solve(req, cancel)

    cache = SpaceCache(grid.bias(), DriverConfig(), Counting())
    a, b = cache.get(5), cache.get(5)
    assert a is b and len(calls) == 1


def test_batch_on_disjoint_examples(grid_steps, solver):
    inst = shifted(grid_steps)
    out, report = io.StringIO(), RunReport()
    h = run_batch(inst, DriverConfig(), out, solver, report)
    assert h is not None and h.quality == 2
    assert out.getvalue().count("#attempt") == 1


def test_batch_climit_sweep(grid_steps, solver):
    inst = shifted(grid_steps)
    assert run_batch(inst, DriverConfig(climit_min=1, climit_max=2), None, solver) is None
    report = RunReport()
    h = run_batch(inst, DriverConfig(climit_min=1, climit_max=6), None, solver, report)
    assert h is not None
    assert report.of_kind("hypothesis")[0]["climit"] <= 6


def test_batch_single_example_matches_run(grid, solver):
    ex0 = next(e for e in grid.examples if e.id == 0)
    inst = InstanceFile(grid.background, grid.target, grid.relevant, [ex0], grid.tests)
    a, b = run(inst, DriverConfig(), None, solver), run_batch(inst, DriverConfig(), None, solver)
    assert a.total_cost == b.total_cost and a.quality == b.quality == 1


def test_batch_on_shared_time_points_is_recorded(grid, solver):
    # traces sharing time points interfere in one answer set; the outcome is only recorded
    report = RunReport()
    run_batch(grid, DriverConfig(), None, solver, report)
    assert report.of_kind("done")


def test_batch_without_examples(grid, solver):
    empty = InstanceFile(grid.background, grid.target, grid.relevant, [], grid.tests)
    assert run_batch(empty, DriverConfig(), None, solver) is None
