import re

import pytest

from aspilp.bias import Bias
from aspilp.hypospace_asp import (ENCODING_PARTS, DecodeError, decode_answer_set, emit_encoding,
                                  generate_space_asp, load_encoding)
from aspilp.native import enumerate_space, max_rule_cost
from aspilp.rules import (CostConfig, HardLimits, alpha_key, is_canonical, render_rule, rule_cost)
from aspilp.solver import Mode, SolveRequest
from aspilp.terms import parse_atoms

from conftest import grid_bias

BIAS = grid_bias()

# Expected bucket sizes of the grid bias under default settings. Costs 4
# and 5 are reference values; the others were cross-checked between both backends.
BUCKETS = {1: 1, 2: 1, 3: 4, 4: 9, 5: 14}

DECODED_RULE = """use_var_type(v(5),cell) use_var_type(v(10),time) use_head_pred(t1,valid_move,2)
bind_hvar(1,v(5)) bind_hvar(2,v(10)) use_body_pred(id_idx(r2,1),agent_at,neg,2)
bind_bvar(id_idx(r2,1),neg,1,v(5)) bind_bvar(id_idx(r2,1),neg,2,v(10))
cost(negbodyliteral,id_idx(r2,1),2) totalcost(2)"""


@pytest.fixture(scope="module")
def asp_spaces(solver):
    return {c: generate_space_asp(BIAS, climit=c, solver=solver) for c in range(1, 9)}


@pytest.fixture(scope="module")
def native_spaces():
    return {c: enumerate_space(BIAS, climit=c) for c in range(1, 9)}


def test_encoding_assets_versioned():
    for part in ENCODING_PARTS:
        assert load_encoding(part).startswith("% version 1")


def test_bundle_constants(bias):
    bundle = emit_encoding(bias, climit=6)
    names = set(bundle.constants)
    assert set(HardLimits().as_constants()) | set(CostConfig().as_constants()) <= names
    assert len(HardLimits().as_constants()) + len(CostConfig().as_constants()) == 22
    assert bundle.constants["climit"] == 6
    assert "#const" not in bundle.program()
    assert len(re.findall(r"^#const ", bundle.text(), re.M)) == len(bundle.constants)


def test_bundle_runs_standalone(bias, solver):
    res = solver.solve(SolveRequest(emit_encoding(bias, climit=3).text(), Mode.ENUMERATE_ALL))
    assert res.exhaustive and len(res.models) >= 2  # alpha-variants may appear more than once


def test_invention_part_optional(bias):
    assert emit_encoding(bias, invention_enabled=False).invention == ""
    assert emit_encoding(bias, HardLimits(maxinventpred=0)).invention == ""
    assert emit_encoding(bias).invention


def test_decode_negated_rule():
    rule, bd = decode_answer_set(parse_atoms(DECODED_RULE))
    assert render_rule(rule) == "valid_move(V5,V10) :- cell(V5), time(V10), not agent_at(V5,V10)."
    assert bd.total == 2
    assert bd.total == rule_cost(rule).total


def test_decode_head_only():
    atoms = [a for a in parse_atoms(DECODED_RULE) if not a.name.startswith(("use_body", "bind_bvar", "cost"))]
    rule, _ = decode_answer_set(atoms)
    assert rule.body == ()


@pytest.mark.parametrize("drop,add", [
    ("use_head_pred", ""),
    ("bind_hvar(2,v(10))", ""),
    ("use_var_type(v(10),time)", ""),
    ("", "bind_bvar(id_idx(r1,1),pos,1,v(5))"),
])
def test_decode_errors(drop, add):
    text = " ".join(t for t in DECODED_RULE.split() if not (drop and t.startswith(drop))) + " " + add
    with pytest.raises(DecodeError):
        decode_answer_set(parse_atoms(text))


@pytest.mark.parametrize("backend", ["asp", "native"])
def test_buckets(backend, asp_spaces, native_spaces):
    spaces = asp_spaces if backend == "asp" else native_spaces
    got = spaces[6].by_cost()
    assert dict(got) == BUCKETS
    assert spaces[5].by_cost()[4] == 9


def test_climit_one_is_empty(asp_spaces, native_spaces):
    assert len(asp_spaces[1]) == len(native_spaces[1]) == 0


def test_backends_agree(asp_spaces, native_spaces):
    for c in range(1, 9):
        assert asp_spaces[c].rendered() == native_spaces[c].rendered(), c
        assert asp_spaces[c].exhaustive


def test_decoded_costs_match_cost_model(asp_spaces):
    for c, space in asp_spaces.items():
        for rule, bd in space:
            assert bd.total == rule_cost(rule, CostConfig(), c).total < c


def test_spaces_are_canonical_and_distinct(asp_spaces, native_spaces):
    types = BIAS.types
    for spaces in (asp_spaces, native_spaces):
        for c in range(2, 8):
            rules = spaces[c].rules
            assert all(is_canonical(r, types) for r in rules)
            keys = [alpha_key(r, types, 4) for r in rules]
            assert len(set(keys)) == len(keys)


def test_monotone_in_climit(asp_spaces):
    for lo in range(1, 9):
        for hi in range(lo, 9):
            assert asp_spaces[lo].rendered() <= asp_spaces[hi].rendered()


def test_render_injective(native_spaces):
    texts = native_spaces[6].texts
    assert len(set(texts)) == len(texts)


def test_native_sorted_and_deterministic():
    a = enumerate_space(BIAS, climit=7)
    b = enumerate_space(BIAS, climit=7)
    assert a.lines() == b.lines()
    keys = [(bd.total, t) for t, (_, bd) in zip(a.texts, a)]
    assert keys == sorted(keys)


def test_invention_disabled_equals_zero_invented(solver):
    off = generate_space_asp(BIAS, climit=7, solver=solver, invention_enabled=False)
    zero = generate_space_asp(BIAS, HardLimits(maxinventpred=0), climit=7, solver=solver)
    assert off.rendered() == zero.rendered()
    assert not any("ip_" in t for t in off.texts)


SMALL_BIASES = {
    "ternary": (Bias.from_strings("p(a,b)", ["q(a,b,b)", "r(a)"]), HardLimits(maxvars=2), 6),
    "two_invented": (Bias.from_strings("p(a)", ["q(a,a)"]), HardLimits(maxvars=2, maxinventpred=2), 8),
    "inv_arity_1_to_3": (Bias.from_strings("p(a,b)", ["q(a,b)"]),
                         HardLimits(maxvars=2, inv_minarity=1, inv_maxarity=3), 7),
    "nullary_target": (Bias.from_strings("p", ["q(a)", "r(a,a)"]), HardLimits(maxvars=2), 7),
}


@pytest.mark.parametrize("name", sorted(SMALL_BIASES))
def test_backends_agree_on_edge_biases(name, solver):
    bias, limits, climit = SMALL_BIASES[name]
    asp = generate_space_asp(bias, limits, climit=climit, solver=solver)
    native = enumerate_space(bias, limits, climit=climit)
    assert asp.exhaustive
    assert asp.rendered() == native.rendered()


def test_pruning_is_safe():
    # without pruning the whole hard-limit-bounded space is built, so keep the limits small
    cases = [(BIAS, HardLimits(maxliterals=2), 7), SMALL_BIASES["nullary_target"],
             (Bias.from_strings("p(a,b)", ["q(a,b,b)", "r(a)"]), HardLimits(maxvars=2, maxliterals=2), 6),
             (Bias.from_strings("p(a)", ["q(a,a)"]), HardLimits(maxvars=2, maxinventpred=2, maxliterals=2), 8)]
    for bias, limits, climit in cases:
        pruned = enumerate_space(bias, limits, climit=climit)
        full = enumerate_space(bias, limits, climit=climit, prune=False)
        assert pruned.rendered() == full.rendered()


def test_zero_costs_admit_the_whole_space():
    # every rule costs 0 < 1, so any positive limit admits the full bounded space
    bias, limits = Bias.from_strings("p(a)", ["q(a)"]), HardLimits(maxvars=2, maxinventpred=0)
    zero = CostConfig.zero()
    one, two = enumerate_space(bias, limits, zero, 1), enumerate_space(bias, limits, zero, 2)
    assert one.rendered() == two.rendered()
    assert len(one) > 0 and all(bd.total == 0 for _, bd in one)
    # with zero costs nothing is pruned, so this is also the size bound for any cost settings
    assert len(enumerate_space(bias, limits, CostConfig(), 10_000)) == len(one)


def test_max_rule_cost_bounds_space():
    bias, limits = Bias.from_strings("p(a,b)", ["q(a,b)", "r(a)"]), HardLimits(maxvars=2, maxliterals=2)
    top = max_rule_cost(bias, limits)
    space = enumerate_space(bias, limits, climit=top + 1)
    assert max(bd.total for _, bd in space) <= top
    assert space.rendered() == enumerate_space(bias, limits, climit=top + 5).rendered()


def test_solver_failure_gives_partial_space():
    class Broken:
        def solve(self, req, cancel=None):
            from aspilp.solver import SolverCrashed
            raise SolverCrashed("boom")

    space = generate_space_asp(BIAS, climit=6, solver=Broken())
    assert len(space) == 0 and not space.exhaustive
