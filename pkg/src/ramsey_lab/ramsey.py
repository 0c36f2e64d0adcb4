"""Copy enumeration, exact Ramsey decisions by backtracking, minimal Ramsey graphs and cores.

A constraint ``(mask, c)`` forbids colouring every edge of ``mask`` with colour ``c``.
Colour 0 is red (heavy family), colour 1 is blue (light family).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import EdgeSet, Graph, GraphError, GraphFamily, edge_subgraph

RED, BLUE = 0, 1


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"search exceeded the node budget of {budget}")
        self.budget = budget


class RefusalError(GraphError):
    """Precondition of a Ramsey/core operation does not hold; ``detail`` explains why."""

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -- copies -------------------------------------------------------------------

@dataclass(frozen=True)
class CopyList:
    host: Graph
    pattern: Graph
    copies: tuple[EdgeSet, ...]

    def __len__(self) -> int:
        return len(self.copies)

    def __iter__(self):
        return iter(self.copies)


def _pattern_order(h: Graph) -> list[int]:
    """Vertices so that each one after the first of a component has an earlier neighbour."""
    order: list[int] = []
    placed = [False] * h.n
    while len(order) < h.n:
        start = max((x for x in range(h.n) if not placed[x]), key=lambda x: (h.degree(x), -x))
        placed[start] = True
        order.append(start)
        while True:
            best = None
            for x in range(h.n):
                if placed[x]:
                    continue
                back = sum(1 for y in h.neighbors[x] if placed[y])
                if back == 0:
                    continue
                key = (back, h.degree(x), -x)
                if best is None or key > best[0]:
                    best = (key, x)
            if best is None:
                break
            placed[best[1]] = True
            order.append(best[1])
    return order


def copy_masks(g: Graph, h: Graph, within: int | None = None, first_only: bool = False) -> list[int]:
    """Edge-index masks of all copies of ``h`` in ``g`` (restricted to the edges in ``within``)."""
    if h.n > g.n or h.e == 0:
        return []
    if within is None:
        within = g.full_mask
    adj = [0] * g.n
    deg = [0] * g.n
    for i in _bits(within):
        u, v = g.edges[i]
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    for x in range(g.n):
        deg[x] = adj[x].bit_count()
    order = _pattern_order(h)
    pos = {p: i for i, p in enumerate(order)}
    back = [[y for y in h.neighbors[p] if pos[y] < pos[p]] for p in order]
    need = [h.degree(p) for p in order]
    eidx = g.edge_index
    h_edges = h.edges
    image = [0] * h.n
    found: set[int] = set()
    out: list[int] = []
    all_v = (1 << g.n) - 1

    def rec(i: int, used: int) -> bool:
        if i == len(order):
            m = 0
            for a, b in h_edges:
                x, y = image[a], image[b]
                m |= 1 << eidx[(x, y) if x < y else (y, x)]
            if m not in found:
                found.add(m)
                out.append(m)
                return first_only
            return False
        cand = all_v & ~used
        for y in back[i]:
            cand &= adj[image[y]]
        while cand:
            low = cand & -cand
            cand ^= low
            x = low.bit_length() - 1
            if deg[x] < need[i]:
                continue
            image[order[i]] = x
            if rec(i + 1, used | low):
                return True
        return False

    rec(0, 0)
    out.sort(key=lambda m: tuple(_bits(m)))
    return out


def enumerate_copies(g: Graph, h: Graph) -> CopyList:
    return CopyList(g, h, tuple(EdgeSet(g, m) for m in copy_masks(g, h)))


def family_copy_masks(g: Graph, fam: GraphFamily, within: int | None = None) -> list[int]:
    seen: set[int] = set()
    out = []
    for h in fam:
        for m in copy_masks(g, h, within):
            if m not in seen:
                seen.add(m)
                out.append(m)
    out.sort(key=lambda m: tuple(_bits(m)))
    return out


def contains_copy(g: Graph, h: Graph, within: int | None = None) -> EdgeSet | None:
    found = copy_masks(g, h, within, first_only=True)
    return EdgeSet(g, found[0]) if found else None


# -- constraint search ------------------------------------------------------------

@dataclass
class SearchStats:
    nodes: int = 0


class _Solver:
    """DPLL over edge colours: unit propagation, pure-colour rule, most-constrained branching."""

    def __init__(self, n_edges: int, r: int, constraints: list[tuple[int, int]], budget: int | None,
                 stats: SearchStats):
        self.m = n_edges
        self.r = r
        self.cons = constraints
        self.size = [m.bit_count() for m, _ in constraints]
        self.members = [list(_bits(m)) for m, _ in constraints]
        self.by_edge: list[list[int]] = [[] for _ in range(n_edges)]
        for k, (m, _) in enumerate(constraints):
            for e in self.members[k]:
                self.by_edge[e].append(k)
        self.color = [-1] * n_edges
        self.dom = [(1 << r) - 1] * n_edges
        self.hits = [0] * len(constraints)
        self.sat = [False] * len(constraints)
        self.live = [[0] * r for _ in range(n_edges)]
        for k, (m, c) in enumerate(constraints):
            for e in self.members[k]:
                self.live[e][c] += 1
        self.trail: list[tuple] = []
        self.budget = budget
        self.stats = stats

    # state changes are logged on the trail so they can be undone
    def _assign(self, e: int, x: int, queue: list[int]) -> bool:
        self.trail.append(("color", e, self.dom[e]))
        self.color[e] = x
        self.dom[e] = 1 << x
        for k in self.by_edge[e]:
            if self.sat[k]:
                continue
            c = self.cons[k][1]
            if c == x:
                self.hits[k] += 1
                self.trail.append(("hit", k))
                if self.hits[k] == self.size[k]:
                    return False
                if self.hits[k] == self.size[k] - 1:
                    for f in self.members[k]:
                        if self.color[f] < 0:
                            if self.dom[f] >> c & 1:
                                self.trail.append(("dom", f, self.dom[f]))
                                self.dom[f] &= ~(1 << c)
                                if self.dom[f] == 0:
                                    return False
                                if self.dom[f] & (self.dom[f] - 1) == 0:
                                    queue.append(f)
                            break
            else:
                self.sat[k] = True
                self.trail.append(("sat", k))
                for f in self.members[k]:
                    self.live[f][c] -= 1
        return True

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            item = self.trail.pop()
            tag = item[0]
            if tag == "color":
                self.color[item[1]] = -1
                self.dom[item[1]] = item[2]
            elif tag == "hit":
                self.hits[item[1]] -= 1
            elif tag == "dom":
                self.dom[item[1]] = item[2]
            else:
                k = item[1]
                self.sat[k] = False
                c = self.cons[k][1]
                for f in self.members[k]:
                    self.live[f][c] += 1

    def _propagate(self, queue: list[int]) -> bool:
        while queue:
            e = queue.pop()
            if self.color[e] >= 0:
                continue
            d = self.dom[e]
            if d == 0:
                return False
            if not self._assign(e, (d & -d).bit_length() - 1, queue):
                return False
        return True

    def _pure(self, edges: list[int], queue: list[int]) -> bool:
        """Give an edge a colour no live constraint forbids; such a choice never hurts."""
        progress = True
        while progress:
            progress = False
            for e in edges:
                if self.color[e] >= 0:
                    continue
                for c in range(self.r):
                    if self.dom[e] >> c & 1 and self.live[e][c] == 0:
                        if not self._assign(e, c, queue) or not self._propagate(queue):
                            return False
                        progress = True
                        break
        return True

    def solve(self, edges: list[int]) -> bool:
        self.stats.nodes += 1
        if self.budget is not None and self.stats.nodes > self.budget:
            raise BudgetExceeded(self.budget)
        queue: list[int] = []
        if not self._pure(edges, queue):
            return False
        best, best_key = -1, None
        for e in edges:
            if self.color[e] < 0:
                key = sum(self.live[e])
                if best_key is None or key > best_key:
                    best, best_key = e, key
        if best < 0:
            return True
        order = sorted((c for c in range(self.r) if self.dom[best] >> c & 1),
                       key=lambda c: (self.live[best][c], c))
        for c in order:
            mark = len(self.trail)
            q: list[int] = []
            if self._assign(best, c, q) and self._propagate(q) and self.solve(edges):
                return True
            self._undo(mark)
        return False


def _components(n_edges: int, constraints: list[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n_edges))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for m, _ in constraints:
        bits = list(_bits(m))
        for b in bits[1:]:
            ra, rb = find(bits[0]), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for e in range(n_edges):
        groups.setdefault(find(e), []).append(e)
    return list(groups.values())


def solve_constraints(n_edges: int, r: int, constraints: Iterable[tuple[int, int]],
                      budget: int | None = None, stats: SearchStats | None = None) -> list[int] | None:
    """A colouring of ``n_edges`` edges with ``r`` colours avoiding every constraint, or None."""
    cons = sorted(set(constraints), key=lambda mc: (tuple(_bits(mc[0])), mc[1]))
    stats = stats or SearchStats()
    solver = _Solver(n_edges, r, cons, budget, stats)
    for comp in _components(n_edges, cons):
        mark = len(solver.trail)
        if not solver.solve(comp):
            return None
        del mark
    colors = [c if c >= 0 else 0 for c in solver.color]
    for m, c in cons:
        if all(colors[e] == c for e in _bits(m)):
            raise RuntimeError("solver returned a colouring violating a constraint")
    return colors


@dataclass(frozen=True)
class RamseyResult:
    is_ramsey: bool
    witness: tuple[int, ...] | None = None
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.is_ramsey


def ramsey_constraints(g: Graph, families: Sequence[GraphFamily]) -> list[tuple[int, int]]:
    cons = []
    for c, fam in enumerate(families):
        cons.extend((m, c) for m in family_copy_masks(g, fam))
    return cons


def verify_witness(g: Graph, families: Sequence[GraphFamily], colors: Sequence[int]) -> EdgeSet | None:
    """A monochromatic forbidden copy under ``colors``, recomputed from scratch; None if clean."""
    for c, fam in enumerate(families):
        within = sum(1 << i for i, x in enumerate(colors) if x == c)
        for h in fam:
            hit = contains_copy(g, h, within)
            if hit is not None:
                return hit
    return None


def ramsey_decide(g: Graph, families: Sequence[GraphFamily], budget: int | None = None) -> RamseyResult:
    """Is every colouring of E(g) with len(families) colours forced to contain a forbidden copy?"""
    if not families:
        raise ValueError("need at least one family")
    stats = SearchStats()
    colors = solve_constraints(g.e, len(families), ramsey_constraints(g, families), budget, stats)
    if colors is None:
        return RamseyResult(True, None, stats.nodes)
    if verify_witness(g, families, colors) is not None:
        raise RuntimeError("witness colouring failed independent verification")
    return RamseyResult(False, tuple(colors), stats.nodes)


def tuple_ramsey_decide(g: Graph, f_h: Sequence[EdgeSet], f_l: Sequence[EdgeSet],
                        budget: int | None = None) -> RamseyResult:
    return multicolor_tuple_decide(g, [f_h, f_l], budget)


def multicolor_tuple_decide(g: Graph, fams: Sequence[Sequence[EdgeSet]], budget: int | None = None) -> RamseyResult:
    cons = []
    for c, copies in enumerate(fams):
        for s in copies:
            s.check_host(g)
            cons.append((s.mask, c))
    stats = SearchStats()
    colors = solve_constraints(g.e, len(fams), cons, budget, stats)
    if colors is None:
        return RamseyResult(True, None, stats.nodes)
    return RamseyResult(False, tuple(colors), stats.nodes)


def minimal_ramsey_subgraph(g: Graph, families: Sequence[GraphFamily], order: Sequence[int] | None = None,
                            budget: int | None = None) -> Graph:
    """Delete edges (in ``order``, default edge-index order) while the graph stays Ramsey.

    One pass suffices: Ramsey-ness is monotone, so an edge that was needed stays needed.
    Isolated vertices are dropped; ``labels`` of the result map back to ``g``.
    """
    if not ramsey_decide(g, families, budget):
        raise RefusalError("input graph is not Ramsey")
    keep = g.full_mask
    for i in (order if order is not None else range(g.e)):
        trial = keep & ~(1 << i)
        sub = g.delete_edges([j for j in range(g.e) if not trial >> j & 1])
        if ramsey_decide(sub, families, budget):
            keep = trial
    return edge_subgraph(g, EdgeSet(g, keep))


def is_minimal_ramsey(g: Graph, families: Sequence[GraphFamily], budget: int | None = None) -> tuple[bool, object]:
    res = ramsey_decide(g, families, budget)
    if not res:
        return False, res.witness
    for i in range(g.e):
        if ramsey_decide(g.delete_edges([i]), families, budget):
            return False, i
    return True, None


# -- cores ----------------------------------------------------------------------

@dataclass(frozen=True)
class CoreTuple:
    G: Graph
    F_H: tuple[EdgeSet, ...]
    F_L: tuple[EdgeSet, ...]
    heavy: GraphFamily | None = field(default=None, compare=False)
    light: GraphFamily | None = field(default=None, compare=False)


def extract_copy_families(g: Graph, families: Sequence[GraphFamily], budget: int | None = None,
                          check_minimal: bool = True) -> list[list[EdgeSet]]:
    """Inclusion-minimal copy subfamilies keeping (g, F_1, ..., F_r) Ramsey.

    Copies are dropped last-first across the concatenated lists; by monotonicity one
    pass yields a minimal subfamily.
    """
    if check_minimal:
        ok, detail = is_minimal_ramsey(g, families, budget)
        if not ok:
            raise RefusalError("input graph is not minimally Ramsey", detail)
    fams = [[EdgeSet(g, m) for m in family_copy_masks(g, fam)] for fam in families]
    flat = [(c, i) for c, f in enumerate(fams) for i in range(len(f))]
    alive = [[True] * len(f) for f in fams]
    for c, i in reversed(flat):
        alive[c][i] = False
        trial = [[s for s, a in zip(f, al) if a] for f, al in zip(fams, alive)]
        if not multicolor_tuple_decide(g, trial, budget):
            alive[c][i] = True
    return [[s for s, a in zip(f, al) if a] for f, al in zip(fams, alive)]


def extract_core(g: Graph, heavy: GraphFamily, light: GraphFamily, budget: int | None = None) -> CoreTuple:
    f_h, f_l = extract_copy_families(g, [heavy, light], budget)
    core = CoreTuple(g, tuple(f_h), tuple(f_l), heavy, light)
    ok, cond, detail = is_core(core)
    if not ok:
        raise RuntimeError(f"extracted tuple fails core condition {cond}: {detail}")
    return core


def _connected_spanning(g: Graph, copies: Sequence[EdgeSet]) -> tuple[bool, str]:
    covered = 0
    for s in copies:
        covered |= s.mask
    if covered != g.full_mask:
        missing = next(_bits(g.full_mask & ~covered))
        return False, f"edge {missing} lies in no copy"
    parent = list(range(g.e))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s in copies:
        bits = list(_bits(s.mask))
        for b in bits[1:]:
            ra, rb = find(bits[0]), find(b)
            if ra != rb:
                parent[ra] = rb
    roots = {find(e) for e in range(g.e)}
    if len(roots) > 1:
        return False, f"copy hypergraph has {len(roots)} components"
    return True, ""


def _single_edge_partners(a: Sequence[EdgeSet], b: Sequence[EdgeSet]) -> tuple[bool, str]:
    masks_b = [s.mask for s in b]
    for i, s in enumerate(a):
        for e in _bits(s.mask):
            want = 1 << e
            if not any(s.mask & m == want for m in masks_b):
                return False, f"copy {s.indices()} has no partner meeting it exactly in edge {e}"
    return True, ""


def is_core(core: CoreTuple) -> tuple[bool, int | None, str]:
    """(ok, first violated condition 1/2/3, detail)."""
    g = core.G
    for s in (*core.F_H, *core.F_L):
        s.check_host(g)
    ok, why = _connected_spanning(g, [*core.F_H, *core.F_L])
    if not ok:
        return False, 1, why
    ok, why = _single_edge_partners(core.F_H, core.F_L)
    if not ok:
        return False, 2, why
    ok, why = _single_edge_partners(core.F_L, core.F_H)
    if not ok:
        return False, 3, why
    return True, None, ""


def is_multicolor_core(g: Graph, fams: Sequence[Sequence[EdgeSet]]) -> tuple[bool, str]:
    """Core conditions for several colours; empty families are treated as absent colours."""
    present = [f for f in fams if f]
    ok, why = _connected_spanning(g, [s for f in present for s in f])
    if not ok:
        return False, "condition 1: " + why
    for i, fi in enumerate(present):
        for j, fj in enumerate(present):
            if i != j:
                ok, why = _single_edge_partners(fi, fj)
                if not ok:
                    return False, f"condition 2 (colours {i}->{j}): " + why
    return True, ""


def merge_three_color_core(g: Graph, f1: Sequence[EdgeSet], f2: Sequence[EdgeSet], f3: Sequence[EdgeSet],
                           families: Sequence[GraphFamily] | None = None) -> CoreTuple:
    """Merge the last two colours of a three-colour core into one light colour."""
    ok, why = is_multicolor_core(g, [f1, f2, f3])
    if not ok:
        raise RefusalError("not a three-colour core: " + why)
    heavy = light = None
    if families is not None:
        heavy = families[0]
        light = families[1].union(families[2]) if len(families[2]) else families[1]
    merged = list(f2)
    seen = {s.mask for s in merged}
    for s in f3:
        if s.mask not in seen:
            seen.add(s.mask)
            merged.append(s)
    core = CoreTuple(g, tuple(f1), tuple(merged), heavy, light)
    ok, cond, detail = is_core(core)
    if not ok:
        raise RuntimeError(f"merged tuple fails core condition {cond}: {detail}")
    return core
