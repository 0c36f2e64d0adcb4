from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, settings

from oracles import graphs, naive_m, naive_m1, naive_m2, naive_m2_edges, naive_mixed
from ramsey_lab.density import (BalancedPair, DensityDomainError, OrderingError, check_numeric_lemmas,
                                degeneracy, densest_subgraph_flow, family_mixed_density, family_two_density, fmt,
                                is_strictly_mixed_balanced, is_strictly_two_balanced, max_density, mixed_density,
                                one_density, reduce_to_strictly_balanced, two_density)
from ramsey_lab.graph import Graph, GraphFamily, biclique, complete, cycle, parse_family, parse_graph_spec, path, sample_gnp


def test_k4_values():
    k4 = complete(4)
    assert (max_density(k4).value, one_density(k4).value, two_density(k4).value) == (F(3, 2), F(2), F(5, 2))


def test_conventions():
    assert two_density(complete(2)).value == F(1, 2)
    assert two_density(Graph(4, ())).value == 0
    assert two_density(path(3)).value == 1
    with pytest.raises(DensityDomainError):
        max_density(Graph(0, ()))
    with pytest.raises(DensityDomainError):
        one_density(Graph(1, ()))


@pytest.mark.parametrize("k", range(3, 8))
def test_clique_two_density(k):
    assert two_density(complete(k)).value == F(k + 1, 2)


@pytest.mark.parametrize("s,t", [(s, t) for s in range(2, 6) for t in range(s, 6)])
def test_biclique_two_density(s, t):
    assert 1 / two_density(biclique(s, t)).value == F(s + t - 2, s * t - 1)


def test_witnesses_attain_value():
    g = Graph.from_edges(7, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6)])
    d = max_density(g)
    assert d.value == F(3, 2) and d.witness.v == 4
    d2 = two_density(g)
    assert F(d2.witness.e - 1, d2.witness.v - 2) == d2.value


@settings(max_examples=150, deadline=None)
@given(graphs(max_n=8))
def test_densities_match_naive(g):
    if g.n >= 1:
        assert max_density(g).value == naive_m(g)
    if g.n >= 2:
        assert one_density(g).value == naive_m1(g)
    assert two_density(g).value == naive_m2(g)
    if g.e:
        for m2l in (F(1, 2), F(1), F(2), F(5, 2)):
            assert mixed_density(g, m2l).value == naive_mixed(g, m2l)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=6).filter(lambda g: g.e <= 10))
def test_induced_and_edge_subsets_agree(g):
    assert two_density(g).value == naive_m2_edges(g)


@pytest.mark.parametrize("seed", range(6))
def test_flow_matches_scan(seed):
    g = sample_gnp(16, 0.35, seed)
    if g.e:
        assert densest_subgraph_flow(g).value == max_density(g).value


def _fits(g, d):
    """m(G) <= d via the edge-to-endpoint transport network (every edge ships b units)."""
    a, b = d.numerator, d.denominator
    net = nx.DiGraph()
    for i, (u, v) in enumerate(g.edges):
        net.add_edge("s", ("e", i), capacity=b)
        net.add_edge(("e", i), ("v", u))
        net.add_edge(("e", i), ("v", v))
    for x in range(g.n):
        net.add_edge(("v", x), "t", capacity=a)
    return nx.maximum_flow_value(net, "s", "t") == b * g.e


@pytest.mark.parametrize("seed", range(3))
def test_flow_on_large_host(seed):
    g = sample_gnp(40, 0.2, seed)
    d = max_density(g)
    assert F(d.witness.e, d.witness.v) == d.value
    assert _fits(g, d.value)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=10))
def test_degeneracy_matches_core_number(g):
    d, order = degeneracy(g)
    assert sorted(order) == list(range(g.n))
    core = nx.core_number(g.to_networkx())
    assert d == (max(core.values()) if core else 0)


def test_strict_balance():
    assert is_strictly_two_balanced(complete(5))[0]
    assert is_strictly_two_balanced(cycle(8))[0]
    ok, viol = is_strictly_two_balanced(Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]))
    assert not ok and viol is not None
    assert is_strictly_mixed_balanced(complete(4), F(2))[0]


@pytest.mark.parametrize("heavy,light,alpha", [
    ("K4", "K3", F(12, 5)),
    ("K5", "K4", F(50, 17)),
    ("K3,3,3,3", "C8", F(189, 38)),
    ("K3,3", "C4", F(27, 14)),
    ("K3", "C4", F(9, 5)),
])
def test_mixed_density_values(heavy, light, alpha):
    h, l = parse_family(heavy), parse_family(light)
    assert family_mixed_density(h, l).value == alpha
    # re-derive from the naive oracle
    assert naive_mixed(parse_graph_spec(heavy), naive_m2(parse_graph_spec(light))) == alpha


@pytest.mark.parametrize("heavy,light", [("K4", "K3"), ("K5", "K4"), ("K3,3,3,3", "C8")])
def test_sandwich_and_lemmas(heavy, light):
    pair = BalancedPair.from_families(parse_family(heavy), parse_family(light))
    assert pair.m2_light < pair.alpha < pair.m2_heavy
    rep = check_numeric_lemmas(pair)
    assert rep.ok, rep.failures()[:3]


def test_ordering_errors():
    with pytest.raises(OrderingError):
        family_mixed_density(parse_family("K3"), parse_family("K4"))
    with pytest.raises(OrderingError):
        BalancedPair.from_families(parse_family("K3+P3"), parse_family("K3"))
    relaxed = BalancedPair.from_families(parse_family("K3"), parse_family("K3"), relaxed=True)
    assert relaxed.alpha == 2


def test_family_two_density_is_min():
    d = family_two_density(parse_family("K4+C5"))
    assert d.value == F(4, 3) and d.member == 1


def test_reduce_to_strictly_balanced():
    # K4 with a pendant edge reduces to K4
    k4p = Graph.from_edges(5, list(complete(4).edges) + [(3, 4)])
    pair = reduce_to_strictly_balanced(GraphFamily((k4p,), "K4p"), parse_family("K3"))
    assert pair.heavy.members[0].e == 6 and pair.alpha == F(12, 5)


def test_fmt():
    assert fmt(F(6, 4)) == "3/2" and fmt(3) == "3"
