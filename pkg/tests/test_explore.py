import json
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from oracles import DATA
from ramsey_lab.density import BalancedPair, OrderingError
from ramsey_lab.explore import (PRISTINE, CoreViolationError, ExplorationConfig, balance, compute_delta1,
                                explore_core, pristine_increments, verify_trace)
from ramsey_lab.fixtures import FixtureError, core_from_fixture, core_to_fixture, load_fixture, rook_core
from ramsey_lab.graph import EdgeSet, Graph, complete, parse_family, parse_graph_spec
from ramsey_lab.ramsey import CoreTuple, is_core

FIXTURES = sorted(p.name for p in DATA.glob("*.json"))


def _naive_delta1(spec: str, alpha: F) -> F:
    h = parse_graph_spec(spec)
    best = None
    for r in range(1, h.e):
        for es in combinations(h.edges, r):
            vf = len({x for uv in es for x in uv})
            val = (h.e - r) - alpha * (h.n - vf)
            best = val if best is None else min(best, val)
    return best


@pytest.mark.parametrize("spec,alpha,expected", [
    ("K3", F(9, 5), F(1, 5)),
    ("K4", F(12, 5), F(1, 5)),
    ("K5", F(50, 17), F(3, 17)),
])
def test_delta1(spec, alpha, expected):
    assert compute_delta1(parse_family(spec), alpha) == expected == _naive_delta1(spec, alpha)


def test_delta1_rejects_symmetric():
    with pytest.raises(OrderingError):
        compute_delta1(parse_family("K3"), F(2))


def test_balance():
    k4 = complete(4)
    assert balance(EdgeSet.of(k4, [0]), F(12, 5)) == 1 - 2 * F(12, 5)
    assert balance(k4.all_edges(), F(3, 2)) == 0


def _config(core, relaxed, cap):
    if relaxed:
        return ExplorationConfig.relaxed(core.heavy, core.light, cap, 10 ** 6)
    return ExplorationConfig.for_pair(BalancedPair.from_families(core.heavy, core.light), cap)


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_traces(name):
    core, relaxed = load_fixture(DATA / name)
    cfg = _config(core, relaxed, core.G.n + 1)
    trace = explore_core(core, cfg)
    rep = verify_trace(trace)
    assert rep.ok, rep.findings
    assert trace.initial_balance == 1 - 2 * cfg.alpha
    bal = [trace.initial_balance] + [s.balance_after for s in trace.steps]
    assert all(x <= y for x, y in zip(bal, bal[1:]))
    assert trace.stop_reason == "exhausted"


@pytest.mark.parametrize("a,b,y", [(3, 3, 3), (4, 4, 6)])
def test_rook_cores_take_pristine_steps(a, b, y):
    core = rook_core(a, b)
    assert is_core(core)[0]
    trace = explore_core(core, ExplorationConfig.relaxed(core.heavy, core.light, 100, 10 ** 6))
    ys = [v for v in pristine_increments(trace) if v is not None]
    assert ys and set(ys) == {y}
    assert verify_trace(trace).ok


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FIXTURES), st.integers(2, 20), st.integers(1, 6))
def test_caps_and_gamma(name, cap, gamma):
    core, relaxed = load_fixture(DATA / name)
    if relaxed:
        cfg = ExplorationConfig.relaxed(core.heavy, core.light, cap, gamma)
    else:
        cfg = ExplorationConfig.for_pair(BalancedPair.from_families(core.heavy, core.light), cap, gamma)
    trace = explore_core(core, cfg)
    rep = verify_trace(trace)
    assert rep.ok, rep.findings
    v = trace.final_graph.v
    if trace.stop_reason == "vertex-cap":
        assert v >= cap
    elif trace.stop_reason == "gamma":
        assert v < cap and sum(s.kind != PRISTINE for s in trace.steps) == gamma


def test_jsonl_header():
    core = rook_core(3, 3)
    trace = explore_core(core, ExplorationConfig.relaxed(core.heavy, core.light, 5, 10))
    lines = trace.to_jsonl().splitlines()
    head = json.loads(lines[0])
    assert head["schema"] == "ramsey-lab/1" and head["stop_reason"] == "vertex-cap"
    assert len(lines) == 1 + len(trace.steps)


def test_fixture_roundtrip():
    core = rook_core(3, 4)
    data = core_to_fixture(core)
    back, relaxed = core_from_fixture(json.loads(json.dumps(data)))
    assert back == core and not relaxed


def test_corrupted_fixture():
    data = json.loads((DATA / "rook33.json").read_text())
    data["F_H"] = data["F_H"][:-1]
    with pytest.raises(FixtureError, match="not a core"):
        core_from_fixture(data)
    core, _ = core_from_fixture(data, validate=False)
    cfg = ExplorationConfig.relaxed(core.heavy, core.light, 100, 10 ** 6)
    with pytest.raises(CoreViolationError):
        explore_core(core, cfg)
    with pytest.raises(FixtureError):
        core_from_fixture({"graph6": "C~"})


def test_explore_rejects_edgeless():
    g = Graph(2, ())
    with pytest.raises(CoreViolationError):
        explore_core(CoreTuple(g, (), ()), ExplorationConfig(F(2), 1, 5, F(1), F(1)))
