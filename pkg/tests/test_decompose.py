from fractions import Fraction as F
from itertools import combinations, product
from math import ceil

import networkx as nx
import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import graphs, naive_m, naive_m1, naive_m2
from ramsey_lab.decompose import (BudgetError, EdgeBipartition, anti_ramsey_coloring, applicable_cases,
                                  chromatic_number, conjecture_search, degenerate_vertex_partition,
                                  is_st_graph, split_bipartite_case, split_chromatic_case, split_forest_case,
                                  split_integer_case, split_st_case, st_core, verify_coloring, verify_forest)
from ramsey_lab.density import BalancedPair
from ramsey_lab.graph import EdgeSet, Graph, GraphError, complete, cycle, edge_subgraph, parse_family
from ramsey_lab.matroid import InfeasibleError


def _nxsub(g: Graph, s: EdgeSet) -> nx.Graph:
    h = nx.Graph()
    h.add_edges_from(s.pairs())
    return h


def _degeneracy(h: nx.Graph) -> int:
    return max(nx.core_number(h).values()) if h.number_of_edges() else 0


def _brute_chi(g: Graph) -> int:
    for k in range(g.n + 1):
        if any(all(c[u] != c[v] for u, v in g.edges) for c in product(range(k), repeat=g.n)):
            return k
    return g.n


def _has_st_subgraph(g: Graph, mask: int, s: int, t: int) -> bool:
    idx = [i for i in range(g.e) if mask >> i & 1]
    for r in range(1, len(idx) + 1):
        for sub in combinations(idx, r):
            deg: dict[int, int] = {}
            for i in sub:
                for x in g.edges[i]:
                    deg[x] = deg.get(x, 0) + 1
            if min(deg.values()) >= s and all(max(deg[u], deg[v]) >= t for u, v in (g.edges[i] for i in sub)):
                return True
    return False


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7))
def test_chromatic_number(g):
    assert chromatic_number(g) == _brute_chi(g)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=9), st.integers(1, 3), st.integers(1, 3))
def test_degenerate_vertex_partition(g, d, k):
    assume(g.n and _degeneracy(g.to_networkx()) <= d * k - 1)
    parts = degenerate_vertex_partition(g, d, k)
    assert sorted(x for p in parts for x in p) == list(range(g.n))
    for p in parts:
        assert _degeneracy(g.to_networkx().subgraph(p)) <= d - 1


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=9), st.integers(2, 4))
def test_bipartite_case(g, k):
    assume(g.n and naive_m(g) < k)
    out = split_bipartite_case(g, k)
    assert _degeneracy(_nxsub(g, out.red)) <= k - 1
    assert nx.is_bipartite(_nxsub(g, out.blue))


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=8), st.integers(2, 4))
def test_chromatic_case(g, k):
    assume(g.n and naive_m(g) < k)
    out = split_chromatic_case(g, k)
    blue = _nxsub(g, out.blue)
    assert nx.is_forest(blue) if blue.number_of_nodes() else True
    red = edge_subgraph(g, out.red)
    assert _brute_chi(red) <= k


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8), st.sampled_from([F(3, 2), F(2), F(5, 2), F(3)]))
def test_forest_case(g, m1h):
    assume(g.e and ceil(naive_m1(g)) <= ceil(m1h) + 1)
    out = split_forest_case(g, m1h)
    t = ceil(m1h)
    if out.red:
        assert ceil(naive_m1(edge_subgraph(g, out.red))) <= t - 1
    if out.blue:
        assert ceil(naive_m1(edge_subgraph(g, out.blue))) <= 2


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7).filter(lambda g: g.e <= 12), st.integers(1, 3), st.integers(0, 2))
def test_st_case(g, s, extra):
    t = s + extra
    try:
        out = split_st_case(g, s, t)
    except InfeasibleError as exc:
        w = exc.witness
        assert is_st_graph(g, w.mask, s + 1, t + 1)
        return
    assert nx.is_forest(_nxsub(g, out.blue)) if out.blue else True
    assert not _has_st_subgraph(g, out.red.mask, s, t)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7).filter(lambda g: g.e <= 10), st.integers(1, 3), st.integers(0, 2))
def test_st_core_is_maximal(g, s, extra):
    t = s + extra
    core = st_core(g, g.full_mask, s, t)
    assert bool(core) == _has_st_subgraph(g, g.full_mask, s, t)
    if core:
        assert is_st_graph(g, core, s, t)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=8), st.integers(1, 3))
def test_integer_case(g, k):
    assume(g.n and naive_m(g) <= k)
    out = split_integer_case(g, k)
    assert nx.is_forest(_nxsub(g, out.blue)) if out.blue else True
    if out.red:
        assert naive_m2(edge_subgraph(g, out.red)) <= k


def test_integer_case_refuses_dense():
    with pytest.raises(InfeasibleError):
        split_integer_case(complete(5), 1)


def test_bipartition_validates():
    k3 = complete(3)
    with pytest.raises(GraphError):
        EdgeBipartition(EdgeSet(k3, 1), EdgeSet(k3, 1), "x")


def _pair(h, l):
    return BalancedPair.from_families(parse_family(h), parse_family(l))


@pytest.mark.parametrize("heavy,light,cases,st_pair", [
    ("K4", "K3", ["a", "b"], None),
    ("K3,3,3,3", "C8", ["d", "e"], (9, 9)),
    ("K3,3", "C4", ["d"], (3, 3)),
    ("K3", "C4", ["b"], None),
    ("K5", "K4", ["a", "b"], None),
])
def test_applicable_cases(heavy, light, cases, st_pair):
    rep = applicable_cases(_pair(heavy, light))
    assert rep.applicable == cases
    assert rep.st == st_pair


def test_anti_ramsey_examples():
    pair = _pair("K4", "K3")
    g = complete(5).delete_edges([0])
    if naive_m(g) <= pair.alpha:
        out = anti_ramsey_coloring(g, pair)
        assert verify_coloring(g, out, pair)[0]
    with pytest.raises(InfeasibleError):
        anti_ramsey_coloring(complete(6), pair)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8))
def test_anti_ramsey_random(g):
    pair = _pair("K4", "K3")
    assume(g.n and naive_m(g) <= pair.alpha)
    out = anti_ramsey_coloring(g, pair)
    assert out is not None
    assert verify_coloring(g, out, pair)[0]


def test_verify_coloring_finds_copy():
    pair = _pair("K4", "K3")
    k4 = complete(4)
    ok, hit = verify_coloring(k4, EdgeBipartition(k4.all_edges(), EdgeSet(k4), "x"), pair)
    assert not ok and hit.e == 6


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=7))
def test_conjecture_search(g):
    res = conjecture_search(g)
    assert res.found
    if g.e:
        assert nx.is_forest(_nxsub(g, res.forest)) if res.forest else True
        rest = res.forest.complement()
        assert (naive_m2(edge_subgraph(g, rest)) if rest else 0) <= naive_m(g)
        assert res.remainder_density() <= res.target


def test_conjecture_budget_and_methods():
    with pytest.raises(BudgetError):
        conjecture_search(complete(8), budget_edges=24)
    assert conjecture_search(complete(5)).method == "matroid"
    assert conjecture_search(Graph(3, ())).method == "trivial"
    c5 = cycle(5)
    r = conjecture_search(c5)
    assert verify_forest(c5, r.forest, r.target)
