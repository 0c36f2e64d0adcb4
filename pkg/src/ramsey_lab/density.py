"""Exact density functionals: m, m1, m2, the mixed 2-density and their family forms.

Every maximum is taken over induced subgraphs (for a fixed vertex set the
ratios only grow with the edge count), scanned as bitmask subsets of the
vertex set.  All arithmetic is integer or :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .graph import EdgeSet, Graph, GraphError, GraphFamily

HALF = Fraction(1, 2)

# Largest vertex set scanned exhaustively in one piece (2**MAX_SCAN subsets).
MAX_SCAN = 20


class DensityDomainError(GraphError):
    pass


class OrderingError(GraphError):
    """Raised when a pair of families violates m2(heavy) >= m2(light) (or a strict variant)."""


@dataclass(frozen=True)
class Density:
    value: Fraction
    witness: EdgeSet
    member: int | None = None  # family functionals: index of the member that attains the value

    def __str__(self) -> str:
        return fmt(self.value)


def fmt(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


# -- subset tables -------------------------------------------------------

def _tables(adj: tuple[int, ...] | list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Edge and vertex counts of every induced subgraph, indexed by vertex bitmask."""
    n = len(adj)
    size = 1 << n
    e = np.zeros(size, dtype=np.int64)
    for i in range(n):
        lo = 1 << i
        low_adj = adj[i] & (lo - 1)
        e[lo:2 * lo] = e[:lo] + np.bitwise_count(np.arange(lo, dtype=np.int64) & low_adj)
    v = np.bitwise_count(np.arange(size, dtype=np.int64)).astype(np.int64)
    return e, v


def _connected(adj, mask: int) -> bool:
    if mask == 0:
        return False
    start = mask & -mask
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        nb = adj[low.bit_length() - 1] & mask & ~seen
        seen |= nb
        frontier |= nb
    return seen == mask


def _lex_key(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _exact_max(num: np.ndarray, den: np.ndarray, valid: np.ndarray) -> tuple[Fraction, np.ndarray] | None:
    """Maximum of num/den over ``valid`` (den > 0 there) plus the mask of maximizers."""
    idx = np.flatnonzero(valid)
    if idx.size == 0:
        return None
    nv, dv = num[idx], den[idx]
    p, q = int(nv[0]), int(dv[0])
    while True:
        score = nv * q - dv * p
        j = int(np.argmax(score))
        if score[j] <= 0:
            break
        p, q = int(nv[j]), int(dv[j])
    best = Fraction(p, q)
    p, q = best.numerator, best.denominator
    hits = idx[nv * q == dv * p]
    return best, hits


def _pick_witness(adj, hits: np.ndarray) -> int:
    """Lexicographically smallest connected maximizer (any maximizer if none is connected)."""
    cands = sorted((int(h) for h in hits), key=_lex_key)
    for c in cands:
        if _connected(adj, c):
            return c
    return cands[0]


def _induced_edges(g: Graph, vmask: int) -> EdgeSet:
    m = 0
    for i, (u, v) in enumerate(g.edges):
        if vmask >> u & 1 and vmask >> v & 1:
            m |= 1 << i
    return EdgeSet(g, m)


RatioFn = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


def _scan(g: Graph, ratio: RatioFn) -> tuple[Fraction, int] | None:
    """Maximise a ratio over vertex subsets; returns (value, witness vertex mask).

    Graphs with more than MAX_SCAN vertices are split into connected components,
    which is exact for every functional here because maximizers can be taken
    connected.
    """
    if g.n <= MAX_SCAN:
        e, v = _tables(g.adj)
        num, den, valid = ratio(e, v)
        res = _exact_max(num, den, valid)
        if res is None:
            return None
        best, hits = res
        return best, _pick_witness(g.adj, hits)
    best = None
    for comp in g.components():
        if len(comp) > MAX_SCAN:
            raise DensityDomainError(
                f"component with {len(comp)} vertices exceeds the exhaustive scan limit of {MAX_SCAN}")
        sub = g.induced(comp)
        r = _scan(sub, ratio)
        if r is None:
            continue
        val, wmask = r
        full = 0
        for i, x in enumerate(_lex_key(wmask)):
            full |= 1 << comp[x]
        if best is None or val > best[0] or (val == best[0] and _lex_key(full) < _lex_key(best[1])):
            best = (val, full)
    return best


# -- single-graph functionals --------------------------------------------

def max_density(g: Graph) -> Density:
    """m(G) = max e_J / v_J over subgraphs with at least one vertex."""
    if g.n == 0:
        raise DensityDomainError("m(G) is undefined for the empty graph")
    if g.e == 0:
        return Density(Fraction(0), EdgeSet(g))
    if g.n > MAX_SCAN and any(len(c) > MAX_SCAN for c in g.components()):
        return densest_subgraph_flow(g)
    r = _scan(g, lambda e, v: (e, v, v >= 1))
    return Density(r[0], _induced_edges(g, r[1]))


def one_density(g: Graph) -> Density:
    """m1(G) = max e_J / (v_J - 1) over subgraphs with at least two vertices."""
    if g.n < 2:
        raise DensityDomainError("m1(G) needs at least two vertices")
    if g.e == 0:
        return Density(Fraction(0), EdgeSet(g))
    r = _scan(g, lambda e, v: (e, v - 1, v >= 2))
    return Density(r[0], _induced_edges(g, r[1]))


def two_density(g: Graph) -> Density:
    """m2(G) with the conventions m2(K2) = 1/2 and m2(edgeless) = 0."""
    if g.e == 0:
        return Density(Fraction(0), EdgeSet(g))
    r = _scan(g, lambda e, v: (e - 1, v - 2, (v >= 3) & (e >= 1)))
    if r is None or r[0] <= HALF:
        return Density(HALF, EdgeSet(g))
    return Density(r[0], _induced_edges(g, r[1]))


def mixed_density(h: Graph, m2_light: Fraction) -> Density:
    """m2(H, L) = max e_J / (v_J - 2 + 1/m2_light) over subgraphs with v_J >= 2."""
    m2_light = Fraction(m2_light)
    if m2_light <= 0:
        raise DensityDomainError("m2_light must be positive")
    if h.n < 2 or h.e == 0:
        raise DensityDomainError("mixed density needs a graph with at least one edge")
    if h.n > MAX_SCAN and m2_light < HALF:
        raise DensityDomainError("component split is only exact for m2_light >= 1/2")
    p, q = m2_light.numerator, m2_light.denominator
    # e / (v - 2 + q/p) = e*p / ((v-2)*p + q)
    r = _scan(h, lambda e, v: (e * p, (v - 2) * p + q, v >= 2))
    return Density(r[0], _induced_edges(h, r[1]))


def densest_subgraph_flow(g: Graph) -> Density:
    """m(G) by Dinkelbach iteration over exact integer min cuts (Goldberg's network).

    Used for hosts beyond the exhaustive scan limit; the witness is the
    source side of the final cut rather than the lexicographic tie-break.
    """
    import networkx as nx

    if g.e == 0:
        return Density(Fraction(0), EdgeSet(g))
    best = Fraction(g.e, g.n)
    best_set = (1 << g.n) - 1
    while True:
        p, q = best.numerator, best.denominator
        net = nx.DiGraph()
        for i, (u, v) in enumerate(g.edges):
            net.add_edge("s", ("e", i), capacity=q)
            net.add_edge(("e", i), ("v", u))
            net.add_edge(("e", i), ("v", v))
        for x in range(g.n):
            net.add_edge(("v", x), "t", capacity=p)
        cut, (side, _) = nx.minimum_cut(net, "s", "t")
        # max over S of q*e(S) - p*|S| equals q*e - cut
        if q * g.e - cut <= 0:
            break
        vs = {x[1] for x in side if isinstance(x, tuple) and x[0] == "v"}
        mask = sum(1 << x for x in vs)
        es = sum(1 for u, v in g.edges if u in vs and v in vs)
        cand = Fraction(es, len(vs))
        if cand <= best:
            break
        best, best_set = cand, mask
    return Density(best, _induced_edges(g, best_set))


def degeneracy(g: Graph) -> tuple[int, list[int]]:
    """Degeneracy and the min-degree removal order (smallest index breaks ties).

    Each vertex has at most ``d`` neighbours that come after it in the order.
    """
    deg = g.degrees()
    alive = set(range(g.n))
    order = []
    d = 0
    while alive:
        x = min(alive, key=lambda y: (deg[y], y))
        d = max(d, deg[x])
        order.append(x)
        alive.remove(x)
        for y in g.neighbors[x]:
            if y in alive:
                deg[y] -= 1
    return d, order


# -- balancedness ----------------------------------------------------------

def _proper_edge_deletions(h: Graph):
    for i in range(h.e):
        yield i, h.delete_edges([i])


def _isolated(h: Graph) -> list[int]:
    return [x for x in range(h.n) if not h.neighbors[x]]


def is_strictly_two_balanced(h: Graph) -> tuple[bool, EdgeSet | None]:
    """True iff every proper subgraph has strictly smaller m2; else a violating edge set."""
    if h.e == 0:
        raise DensityDomainError("balancedness needs at least one edge")
    target = two_density(h).value
    if _isolated(h):
        return False, h.all_edges()
    for i, sub in _proper_edge_deletions(h):
        if two_density(sub).value >= target:
            return False, EdgeSet(h, h.full_mask & ~(1 << i))
    return True, None


def is_strictly_mixed_balanced(h: Graph, m2_light: Fraction) -> tuple[bool, EdgeSet | None]:
    if h.e == 0:
        raise DensityDomainError("balancedness needs at least one edge")
    target = mixed_density(h, m2_light).value
    if _isolated(h):
        return False, h.all_edges()
    for i, sub in _proper_edge_deletions(h):
        if sub.e and mixed_density(sub, m2_light).value >= target:
            return False, EdgeSet(h, h.full_mask & ~(1 << i))
    return True, None


# -- families --------------------------------------------------------------

def family_two_density(fam: GraphFamily) -> Density:
    best = None
    for i, h in enumerate(fam.members):
        d = two_density(h)
        if best is None or d.value < best.value:
            best = Density(d.value, d.witness, i)
    return best


def family_mixed_density(heavy: GraphFamily, light: GraphFamily) -> Density:
    m2l = family_two_density(light).value
    m2h = family_two_density(heavy).value
    if m2h < m2l:
        raise OrderingError(f"m2(heavy)={fmt(m2h)} is below m2(light)={fmt(m2l)}")
    best = None
    for i, h in enumerate(heavy.members):
        d = mixed_density(h, m2l)
        if best is None or d.value < best.value:
            best = Density(d.value, d.witness, i)
    return best


def family_one_density(fam: GraphFamily) -> Fraction:
    return min(one_density(h).value for h in fam.members)


@dataclass(frozen=True)
class BalancedPair:
    heavy: GraphFamily
    light: GraphFamily
    alpha: Fraction
    m2_light: Fraction
    m2_heavy: Fraction = field(default=Fraction(0))
    relaxed: bool = False

    @classmethod
    def from_families(cls, heavy: GraphFamily, light: GraphFamily, relaxed: bool = False) -> "BalancedPair":
        """Build and validate a pair.

        ``relaxed`` skips the strict-balancedness checks and allows
        m2(heavy) == m2(light); symmetric test fixtures such as ({K3},{K3}) need it.
        """
        m2l = family_two_density(light).value
        m2h = family_two_density(heavy).value
        alpha = family_mixed_density(heavy, light).value
        pair = cls(heavy, light, alpha, m2l, m2h, relaxed)
        if not relaxed:
            pair.validate()
        return pair

    def validate(self) -> None:
        for l in self.light:
            ok, _ = is_strictly_two_balanced(l)
            if not ok:
                raise OrderingError(f"light member {l} is not strictly 2-balanced")
        for h in self.heavy:
            ok, _ = is_strictly_mixed_balanced(h, self.m2_light)
            if not ok:
                raise OrderingError(f"heavy member {h} is not strictly m2(.,L)-balanced")
        if self.m2_light < self.m2_heavy and not (self.m2_light < self.alpha < self.m2_heavy):
            raise OrderingError(
                f"sandwich fails: {fmt(self.m2_light)} < {fmt(self.alpha)} < {fmt(self.m2_heavy)}")


def _minimal_subgraph(g: Graph, value_of: Callable[[Graph], Fraction]) -> Graph:
    """Delete edges (lowest index first) while the functional is unchanged; drop isolated vertices."""
    target = value_of(g)
    cur = g
    changed = True
    while changed:
        changed = False
        for i in range(cur.e):
            sub = cur.delete_edges([i])
            if sub.e and value_of(sub) == target:
                cur = sub
                changed = True
                break
    keep = [x for x in range(cur.n) if cur.neighbors[x]]
    return cur.induced(keep)


def reduce_to_strictly_balanced(heavy: GraphFamily, light: GraphFamily) -> BalancedPair:
    """Replace every member by an edge-minimal subgraph attaining its (mixed) 2-density."""
    m2h = family_two_density(heavy).value
    m2l = family_two_density(light).value
    if not (m2h > m2l > 1):
        raise OrderingError(f"need m2(heavy) > m2(light) > 1, got {fmt(m2h)} and {fmt(m2l)}")
    new_light = tuple(_minimal_subgraph(l, lambda x: two_density(x).value) for l in light)
    m2l_new = min(two_density(l).value for l in new_light)
    new_heavy = tuple(_minimal_subgraph(h, lambda x: mixed_density(x, m2l_new).value) for h in heavy)
    return BalancedPair.from_families(GraphFamily(new_heavy, heavy.name), GraphFamily(new_light, light.name))


# -- numeric lemmas --------------------------------------------------------

@dataclass
class LemmaCheck:
    lemma: str
    member: int
    vertices: tuple[int, ...]
    lhs: Fraction
    rhs: Fraction
    strict: bool

    @property
    def slack(self) -> Fraction:
        return self.lhs - self.rhs

    @property
    def ok(self) -> bool:
        return self.slack > 0 if self.strict else self.slack >= 0


@dataclass
class LemmaReport:
    checks: list[LemmaCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[LemmaCheck]:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        for c in self.checks:
            s = out.setdefault(c.lemma, {"checked": 0, "failed": 0, "min_slack": None})
            s["checked"] += 1
            s["failed"] += not c.ok
            if s["min_slack"] is None or c.slack < s["min_slack"]:
                s["min_slack"] = c.slack
        return out


def _vertex_subsets(h: Graph):
    """(vertex tuple, v, induced edge count) for every subset with at least two vertices."""
    e, v = _tables(h.adj)
    for mask in range(1, 1 << h.n):
        if v[mask] >= 2:
            yield _lex_key(mask), int(v[mask]), int(e[mask])


def check_numeric_lemmas(pair: BalancedPair) -> LemmaReport:
    """Exhaustively re-check the four counting lemmas behind the balance argument.

    For each lemma and each vertex subset the extremal edge count is used, so the
    scan covers every subgraph.  Spanning proper subgraphs appear with ``e_H - 1``
    edges.  Failures indicate a bug: the lemmas are theorems.
    """
    a, m2l, m2h = pair.alpha, pair.m2_light, pair.m2_heavy
    checks = [
        LemmaCheck("sandwich-lower", -1, (), a, m2l, True),
        LemmaCheck("sandwich-upper", -1, (), m2h, a, True),
    ]
    for i, h in enumerate(pair.heavy):
        m2hl = mixed_density(h, m2l).value
        for vs, vf, ef in _vertex_subsets(h):
            if vf == h.n:
                ef = h.e - 1  # largest proper spanning subgraph
                if ef < 0:
                    continue
            checks.append(LemmaCheck("gt-alpha", i, vs, Fraction(h.e - ef), m2hl * (h.n - vf), True))
            checks.append(LemmaCheck("gt-alpha-family", i, vs, m2hl * (h.n - vf), a * (h.n - vf), False))
    X = min(Fraction(h.e - 1) - a * (h.n - 2) for h in pair.heavy)
    for i, l in enumerate(pair.light):
        m2 = two_density(l).value
        for vs, vj, ej in _vertex_subsets(l):
            if vj == l.n:
                ej = l.e - 1
            if ej >= 1:
                is_k2 = vj == 2
                checks.append(LemmaCheck("m2L", i, vs, Fraction(l.e - ej), m2 * (l.n - vj), not is_k2))
                checks.append(LemmaCheck("m2L-family", i, vs, m2 * (l.n - vj), m2l * (l.n - vj), False))
            if vj == l.n:
                ej += 1  # K = L itself is allowed here
            if ej >= 1:
                coef = a / m2 - 1
                lhs = X + (vj - 2) * (a - 1)
                checks.append(LemmaCheck("X-vs-alpha", i, vs, lhs, ej * coef, not (vj == 2 and ej == 1)))
    return LemmaReport(checks)
