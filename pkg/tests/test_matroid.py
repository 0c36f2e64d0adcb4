from fractions import Fraction as F
from math import ceil

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from oracles import graphs, naive_m, naive_m1, naive_sparse
from ramsey_lab.graph import EdgeSet, complete, edge_subgraph
from ramsey_lab.matroid import (GraphicOracle, InfeasibleError, PebbleGame, SparsityOracle, graphic_independent,
                                graphic_rank, hakimi_orientation, hakimi_pseudoforests, matroid_partition,
                                matroid_rank, nash_williams, sparse_witness)


def _is_forest(s: EdgeSet) -> bool:
    return nx.is_forest(nx.Graph(s.pairs())) if s else True


def _is_pseudoforest(s: EdgeSet) -> bool:
    h = nx.Graph(s.pairs())
    return all(h.subgraph(c).number_of_edges() <= len(c) for c in nx.connected_components(h))


@st.composite
def graph_and_mask(draw, max_n=6):
    g = draw(graphs(max_n=max_n))
    mask = draw(st.integers(0, g.full_mask)) if g.e else 0
    return g, mask


@settings(max_examples=150, deadline=None)
@given(graph_and_mask(), st.integers(1, 3))
def test_sparsity_matches_bruteforce(gm, k):
    g, mask = gm
    assert SparsityOracle(g, k).independent_mask(mask) == naive_sparse(g, mask, k)


@settings(max_examples=100, deadline=None)
@given(graph_and_mask(max_n=8))
def test_graphic_matches_networkx(gm):
    g, mask = gm
    s = EdgeSet(g, mask)
    assert graphic_independent(g, s) == _is_forest(s)
    assert graphic_rank(g, s) == matroid_rank(GraphicOracle(g), s)


@settings(max_examples=80, deadline=None)
@given(graph_and_mask(max_n=6), st.integers(0, 40), st.sampled_from(["graphic", "s1", "s2"]))
def test_circuits_are_minimal_dependent(gm, pick, kind):
    g, mask = gm
    if not g.e:
        return
    o = GraphicOracle(g) if kind == "graphic" else SparsityOracle(g, int(kind[1]))
    # shrink mask to an independent set greedily, then probe one outside edge
    indep = 0
    for i in range(g.e):
        if mask >> i & 1 and o.independent_mask(indep | 1 << i):
            indep |= 1 << i
    outside = [i for i in range(g.e) if not indep >> i & 1]
    if not outside:
        return
    x = outside[pick % len(outside)]
    c = o.circuit(indep, x)
    if o.independent_mask(indep | 1 << x):
        assert c is None
        return
    assert c is not None and c >> x & 1 and not c & ~(indep | 1 << x)
    assert not o.independent_mask(c)
    for y in range(g.e):
        if c >> y & 1:
            assert o.independent_mask(c & ~(1 << y))


def test_pebble_game_rejects_l_out_of_range():
    with pytest.raises(ValueError):
        PebbleGame(4, 1, 2)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7), st.integers(1, 3))
def test_forest_partition_iff_arboricity(g, t):
    if not g.e:
        return
    out = matroid_partition(g, [GraphicOracle(g) for _ in range(t)])
    assert out.ok == (ceil(naive_m1(g)) <= t)
    if out.ok:
        assert all(_is_forest(p) for p in out.parts)
        assert sum(len(p) for p in out.parts) == g.e
    else:
        cert = out.certificate
        assert t * graphic_rank(g, cert) < len(cert)


def test_k5_two_forests_certificate():
    k5 = complete(5)
    out = matroid_partition(k5, [GraphicOracle(k5), GraphicOracle(k5)])
    assert not out.ok
    assert out.certificate.indices() == list(range(9))


@pytest.mark.parametrize("k,expected", [(4, [3, 3]), (5, [4, 4, 2])])
def test_nash_williams_cliques(k, expected):
    assert [len(p) for p in nash_williams(complete(k))] == expected


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=8))
def test_nash_williams_count(g):
    if not g.e:
        return
    parts = nash_williams(g)
    assert len(parts) == ceil(naive_m1(g))
    assert all(_is_forest(p) for p in parts)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=8), st.integers(1, 3))
def test_hakimi(g, k):
    if not g.e:
        return
    if naive_m(g) <= k:
        tail = hakimi_orientation(g, k)
        outdeg = [0] * g.n
        for t in tail.values():
            outdeg[t] += 1
        assert max(outdeg) <= k
        classes = hakimi_pseudoforests(g, k)
        assert len(classes) == k and all(_is_pseudoforest(c) for c in classes)
    else:
        with pytest.raises(InfeasibleError) as info:
            hakimi_orientation(g, k)
        w = info.value.witness
        assert F(w.e, w.v) > k


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7), st.integers(1, 3))
def test_sparse_witness(g, k):
    if not g.e or naive_m(g) > k:
        return
    w = sparse_witness(g, k)
    assert naive_sparse(g, w.mask, k)
    assert g.e <= w.e + g.n - 1


def test_sparse_witness_k5():
    k5 = complete(5)
    w = sparse_witness(k5, 2)
    assert w.e == 6
    assert naive_sparse(k5, w.mask, 2)
    assert edge_subgraph(k5, w).e == 6
