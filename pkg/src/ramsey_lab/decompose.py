"""Two-colourings of sparse graphs avoiding a heavy family in red and a light family in blue.

Each ``split_*`` routine realises one combinatorial decomposition and re-checks its
structural claim before returning.  ``conjecture_search`` looks for a forest whose
removal drops the 2-density to at most m(G).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor

from .density import (BalancedPair, degeneracy, fmt, max_density, one_density,
                      two_density)
from .graph import EdgeSet, Graph, GraphError, edge_subgraph
from .matroid import (GraphicOracle, InfeasibleError, InternalConsistencyError, SparsityOracle,
                      graphic_independent, matroid_partition2, nash_williams)
from .ramsey import contains_copy


class BudgetError(GraphError):
    pass


@dataclass(frozen=True)
class EdgeBipartition:
    red: EdgeSet
    blue: EdgeSet
    strategy: str
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.red.host != self.blue.host:
            raise GraphError("red and blue live on different hosts")
        if self.red.mask & self.blue.mask or (self.red.mask | self.blue.mask) != self.red.host.full_mask:
            raise GraphError("red and blue must partition the edge set")

    @property
    def host(self) -> Graph:
        return self.red.host

    def to_json(self, verified: bool | None = None) -> dict:
        out = {"strategy": self.strategy, "red": self.red.indices(), "blue": self.blue.indices()}
        if verified is not None:
            out["verified"] = verified
        return out


def _bip(g: Graph, red_mask: int, strategy: str, **params) -> EdgeBipartition:
    return EdgeBipartition(EdgeSet(g, red_mask), EdgeSet(g, g.full_mask & ~red_mask), strategy, params)


def _mask_degeneracy(g: Graph, mask: int) -> int:
    if not mask:
        return 0
    return degeneracy(edge_subgraph(g, EdgeSet(g, mask)))[0]


def _is_bipartite_mask(g: Graph, mask: int, parts: int = 2) -> bool:
    return _colorable(edge_subgraph(g, EdgeSet(g, mask)), parts) if mask else True


# -- chromatic number ----------------------------------------------------------

def _colorable(h: Graph, k: int) -> bool:
    if h.n == 0:
        return True
    if k <= 0:
        return False
    order = sorted(range(h.n), key=lambda x: (-h.degree(x), x))
    color = [-1] * h.n

    def rec(i: int, used: int) -> bool:
        if i == h.n:
            return True
        x = order[i]
        banned = {color[y] for y in h.neighbors[x] if color[y] >= 0}
        # symmetry: a fresh colour is only tried once
        for c in range(min(used + 1, k)):
            if c not in banned:
                color[x] = c
                if rec(i + 1, max(used, c + 1)):
                    return True
        color[x] = -1
        return False

    return rec(0, 0)


def chromatic_number(h: Graph) -> int:
    if h.n == 0:
        return 0
    k = 1 if h.e == 0 else 2
    while not _colorable(h, k):
        k += 1
    return k


# -- vertex partitions --------------------------------------------------------

def degenerate_vertex_partition(g: Graph, d: int, k: int) -> list[list[int]]:
    """Split V(g) into k parts each inducing a (d-1)-degenerate graph; needs g (dk-1)-degenerate."""
    if d < 1 or k < 1:
        raise ValueError("d and k must be positive")
    deg, removal = degeneracy(g)
    if deg > d * k - 1:
        raise InfeasibleError(f"graph is {deg}-degenerate, above d*k-1 = {d * k - 1}")
    part_of = [-1] * g.n
    parts: list[list[int]] = [[] for _ in range(k)]
    for x in reversed(removal):
        load = [0] * k
        for y in g.neighbors[x]:
            if part_of[y] >= 0:
                load[part_of[y]] += 1
        j = min(range(k), key=lambda i: (load[i], i))
        part_of[x] = j
        parts[j].append(x)
    for p in parts:
        p.sort()
        if len(p) and degeneracy(g.induced(p))[0] > d - 1:
            raise InternalConsistencyError("degenerate partition produced a part that is too dense")
    return parts


def _inside_mask(g: Graph, parts: list[list[int]]) -> int:
    part_of = {}
    for j, p in enumerate(parts):
        for x in p:
            part_of[x] = j
    return sum(1 << i for i, (u, v) in enumerate(g.edges) if part_of[u] == part_of[v])


def _require_density_below(g: Graph, k: int) -> None:
    if g.n and max_density(g).value >= k:
        raise InfeasibleError(f"needs m(G) < {k}")


def split_bipartite_case(g: Graph, k: int) -> EdgeBipartition:
    """Red (k-1)-degenerate, blue bipartite; needs m(G) < k."""
    _require_density_below(g, k)
    inside = _inside_mask(g, degenerate_vertex_partition(g, k, 2))
    out = _bip(g, inside, "a", k=k)
    if _mask_degeneracy(g, out.red.mask) > k - 1 or not _is_bipartite_mask(g, out.blue.mask):
        raise InternalConsistencyError("bipartite split failed verification")
    return out


def split_chromatic_case(g: Graph, k: int) -> EdgeBipartition:
    """Blue a forest, red k-colourable; needs m(G) < k."""
    _require_density_below(g, k)
    parts = degenerate_vertex_partition(g, 2, k)
    inside = _inside_mask(g, parts)
    out = _bip(g, g.full_mask & ~inside, "b", k=k)
    if not graphic_independent(g, out.blue) or not _is_bipartite_mask(g, out.red.mask, k):
        raise InternalConsistencyError("chromatic split failed verification")
    return out


def split_forest_case(g: Graph, m1_heavy: Fraction) -> EdgeBipartition:
    """Red a union of t-1 forests, blue a union of two, where t = ceil(m1_heavy)."""
    t = ceil(Fraction(m1_heavy))
    if t < 1:
        raise ValueError("m1_heavy must be positive")
    forests = nash_williams(g) if g.e else []
    if len(forests) > t + 1:
        raise InfeasibleError(f"needs {len(forests)} forests, more than t+1 = {t + 1}")
    masks = [f.mask for f in forests] + [0] * (t + 1 - len(forests))
    red = 0
    for m in masks[:t - 1]:
        red |= m
    out = _bip(g, red, "c", t=t)
    blue_parts = masks[t - 1:]
    if any(not GraphicOracle(g).independent_mask(m) for m in masks) or len(blue_parts) != 2:
        raise InternalConsistencyError("forest split failed verification")
    return out


# -- (s,t)-graphs ------------------------------------------------------------

def st_core(g: Graph, mask: int, s: int, t: int) -> int:
    """Edges of the unique maximal (s,t)-subgraph of the edge set ``mask`` (0 if none).

    A union of (s,t)-graphs is again one, so peeling low-degree vertices and
    edges with two light endpoints converges to the maximal one.
    """
    deg = [0] * g.n
    for i in range(g.e):
        if mask >> i & 1:
            u, v = g.edges[i]
            deg[u] += 1
            deg[v] += 1
    changed = True
    while changed and mask:
        changed = False
        for i in range(g.e):
            if not mask >> i & 1:
                continue
            u, v = g.edges[i]
            if deg[u] < s or deg[v] < s or (deg[u] < t and deg[v] < t):
                mask &= ~(1 << i)
                deg[u] -= 1
                deg[v] -= 1
                changed = True
    return mask


def is_st_graph(g: Graph, mask: int, s: int, t: int) -> bool:
    if not mask:
        return False
    return st_core(g, mask, s, t) == mask


def split_st_case(g: Graph, s: int, t: int) -> EdgeBipartition:
    """Blue a forest, red (s,t)-avoiding, by eliminating low-degree vertices and light edges.

    If elimination gets stuck, what remains is an (s+1,t+1)-graph and is raised as
    the witness of an :class:`InfeasibleError`.
    """
    if not 1 <= s <= t:
        raise ValueError("need 1 <= s <= t")
    alive = g.full_mask
    deg = g.degrees()
    steps: list[tuple[str, int]] = []
    while alive:
        inc = [[] for _ in range(g.n)]
        for i in range(g.e):
            if alive >> i & 1:
                u, v = g.edges[i]
                inc[u].append(i)
                inc[v].append(i)
        x = next((x for x in range(g.n) if 0 < deg[x] <= s), None)
        if x is not None:
            for i in inc[x]:
                alive &= ~(1 << i)
                u, v = g.edges[i]
                deg[u] -= 1
                deg[v] -= 1
            steps.append(("v", x))
            steps.append(("edges", sum(1 << i for i in inc[x])))
            continue
        i = next((i for i in range(g.e) if alive >> i & 1
                  and deg[g.edges[i][0]] <= t and deg[g.edges[i][1]] <= t), None)
        if i is None:
            raise InfeasibleError(f"contains an ({s + 1},{t + 1})-graph", EdgeSet(g, alive))
        alive &= ~(1 << i)
        u, v = g.edges[i]
        deg[u] -= 1
        deg[v] -= 1
        steps.append(("e", i))
    parent = list(range(g.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    forest = 0
    j = len(steps) - 1
    while j >= 0:
        tag, val = steps[j]
        if tag == "edges":
            # vertex step: one incident edge to the forest, the rest to the avoiding side
            first = val & -val
            i = first.bit_length() - 1
            u, v = g.edges[i]
            parent[find(u)] = find(v)
            forest |= first
            j -= 2
            continue
        u, v = g.edges[val]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            forest |= 1 << val
        j -= 1
    out = _bip(g, g.full_mask & ~forest, "d", s=s, t=t)
    if not graphic_independent(g, out.blue) or st_core(g, out.red.mask, s, t):
        raise InternalConsistencyError("(s,t) split failed verification")
    return out


def split_integer_case(g: Graph, k: int) -> EdgeBipartition:
    """Blue a forest, red with m2 <= k, by matroid partition; needs m(G) <= k."""
    if g.n and max_density(g).value > k:
        raise InfeasibleError(f"needs m(G) <= {k}")
    out = matroid_partition2(g, GraphicOracle(g), SparsityOracle(g, k))
    if not out.ok:
        raise InternalConsistencyError("integer partition reached a certificate although m(G) <= k")
    forest, rest = out.parts
    res = _bip(g, rest.mask, "e", k=k)
    if not graphic_independent(g, forest) or (rest.mask and two_density(edge_subgraph(g, rest)).value > k):
        raise InternalConsistencyError("integer split failed verification")
    return res


# -- case analysis --------------------------------------------------------------

@dataclass
class StrategyReport:
    alpha: Fraction
    holds: dict[str, bool]
    details: dict[str, dict]
    st: tuple[int, int] | None = None

    @property
    def applicable(self) -> list[str]:
        return [c for c in "abcde" if self.holds[c]]

    def to_json(self) -> dict:
        def conv(x):
            if isinstance(x, Fraction):
                return fmt(x)
            if isinstance(x, (list, tuple)):
                return [conv(y) for y in x]
            if isinstance(x, dict):
                return {k: conv(v) for k, v in x.items()}
            return x
        return {"alpha": fmt(self.alpha), "holds": self.holds, "details": conv(self.details),
                "st": list(self.st) if self.st else None}


def st_parameters(pair: BalancedPair) -> list[tuple[int, int]]:
    """All (s,t) with 1 <= s <= t <= max heavy degree, the density inequality, and an (s,t)-graph in every heavy member."""
    a = pair.alpha
    top = max(max(h.degrees()) for h in pair.heavy)
    out = []
    for s in range(1, top + 1):
        for t in range(s, top + 1):
            if Fraction(1, s + 1) + Fraction(1, t + 1) >= 1 / a:
                continue
            if all(st_core(h, h.full_mask, s, t) for h in pair.heavy):
                out.append((s, t))
    return out


def applicable_cases(pair: BalancedPair) -> StrategyReport:
    a = pair.alpha
    chi_l = [chromatic_number(l) for l in pair.light]
    chi_h = [chromatic_number(h) for h in pair.heavy]
    m1_l = [one_density(l).value for l in pair.light]
    sts = st_parameters(pair)
    k_e = ceil(a)
    holds = {
        "a": all(c >= 3 for c in chi_l),
        "b": all(c > a + 1 for c in chi_h),
        "c": all(m > 2 for m in m1_l),
        "d": bool(sts),
        "e": k_e < pair.m2_heavy,
    }
    details = {
        "a": {"chi_light": chi_l, "k": floor(a) + 1},
        "b": {"chi_heavy": chi_h, "bound": a + 1, "k": floor(a) + 1},
        "c": {"m1_light": m1_l, "t": ceil(min(one_density(h).value for h in pair.heavy))},
        "d": {"pairs": [list(p) for p in sts]},
        "e": {"k": k_e, "m2_heavy": pair.m2_heavy},
    }
    return StrategyReport(a, holds, details, sts[0] if sts else None)


def verify_coloring(g: Graph, parts: EdgeBipartition, pair: BalancedPair) -> tuple[bool, EdgeSet | None]:
    """No red copy of a heavy member and no blue copy of a light member."""
    parts.red.check_host(g)
    for h in pair.heavy:
        hit = contains_copy(g, h, parts.red.mask)
        if hit is not None:
            return False, hit
    for l in pair.light:
        hit = contains_copy(g, l, parts.blue.mask)
        if hit is not None:
            return False, hit
    return True, None


CASE_ORDER = ("e", "b", "a", "c", "d")


def anti_ramsey_coloring(g: Graph, pair: BalancedPair, report: StrategyReport | None = None
                         ) -> EdgeBipartition | None:
    """A red/blue colouring with no red heavy and no blue light copy, or None if no case applies.

    Requires m(G) <= alpha.
    """
    a = pair.alpha
    if g.n and max_density(g).value > a:
        raise InfeasibleError(f"m(G) exceeds alpha = {fmt(a)}")
    report = report or applicable_cases(pair)
    for case in CASE_ORDER:
        if not report.holds[case]:
            continue
        if case == "e":
            out = split_integer_case(g, ceil(a))
        elif case == "b":
            out = split_chromatic_case(g, floor(a) + 1)
        elif case == "a":
            out = split_bipartite_case(g, floor(a) + 1)
        elif case == "c":
            out = split_forest_case(g, min(one_density(h).value for h in pair.heavy))
        else:
            out = split_st_case(g, *report.st)
        ok, _ = verify_coloring(g, out, pair)
        if ok:
            return out
    return None


# -- partitioning conjecture --------------------------------------------------------

@dataclass(frozen=True)
class ConjectureResult:
    graph: Graph
    target: Fraction
    forest: EdgeSet | None
    method: str
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.forest is not None

    def remainder_density(self) -> Fraction:
        rest = self.forest.complement()
        return two_density(edge_subgraph(self.graph, rest)).value if rest.mask else Fraction(0)


def _m2_mask(g: Graph, mask: int) -> Fraction:
    return two_density(edge_subgraph(g, EdgeSet(g, mask))).value if mask else Fraction(0)


def verify_forest(g: Graph, forest: EdgeSet, target: Fraction) -> bool:
    return graphic_independent(g, forest) and _m2_mask(g, g.full_mask & ~forest.mask) <= target


def _greedy_forest(g: Graph, target: Fraction) -> int | None:
    """Grow a forest, each time adding the edge that most lowers m2 of the rest."""
    oracle = GraphicOracle(g)
    forest = 0
    while True:
        rest = g.full_mask & ~forest
        if _m2_mask(g, rest) <= target:
            return forest
        best = None
        for i in range(g.e):
            if forest >> i & 1 or not oracle.independent_mask(forest | (1 << i)):
                continue
            val = _m2_mask(g, rest & ~(1 << i))
            if best is None or val < best[0]:
                best = (val, i)
        if best is None:
            return None
        forest |= 1 << best[1]


def conjecture_search(g: Graph, budget_edges: int = 24) -> ConjectureResult:
    """A forest F with m2(G - F) <= m(G), or a verified NONE after exhausting all maximal forests."""
    if g.e > budget_edges:
        raise BudgetError(f"{g.e} edges exceed the budget of {budget_edges}")
    if g.n == 0 or g.e == 0:
        return ConjectureResult(g, Fraction(0), EdgeSet(g), "trivial")
    target = max_density(g).value
    if target.denominator == 1:
        out = split_integer_case(g, int(target))
        return ConjectureResult(g, target, out.blue, "matroid")
    found = _greedy_forest(g, target)
    if found is not None:
        f = EdgeSet(g, found)
        if not verify_forest(g, f, target):
            raise InternalConsistencyError("greedy forest failed verification")
        return ConjectureResult(g, target, f, "greedy")
    # exhaustive: maximal forests suffice since removing more edges never raises m2
    parent0 = list(range(g.n))
    nodes = 0

    def find(parent, a):
        while parent[a] != a:
            a = parent[a]
        return a

    def rec(i: int, parent: list[int], forest: int, out: int) -> int | None:
        nonlocal nodes
        nodes += 1
        if i == g.e:
            return forest if _m2_mask(g, out) <= target else None
        u, v = g.edges[i]
        ru, rv = find(parent, u), find(parent, v)
        if ru == rv:
            out2 = out | (1 << i)
            if _m2_mask(g, out2) > target:
                return None
            return rec(i + 1, parent, forest, out2)
        p2 = list(parent)
        p2[ru] = rv
        res = rec(i + 1, p2, forest | (1 << i), out)
        if res is not None:
            return res
        out2 = out | (1 << i)
        if _m2_mask(g, out2) > target:
            return None
        return rec(i + 1, parent, forest, out2)

    res = rec(0, parent0, 0, 0)
    if res is None:
        return ConjectureResult(g, target, None, "exhaustive", nodes)
    f = EdgeSet(g, res)
    if not verify_forest(g, f, target):
        raise InternalConsistencyError("search forest failed verification")
    return ConjectureResult(g, target, f, "exhaustive", nodes)
