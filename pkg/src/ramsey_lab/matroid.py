"""Graphic and sparsity matroids on edge sets, matroid partition, and classical decompositions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import ceil

from .graph import EdgeSet, Graph, GraphError


class InfeasibleError(GraphError):
    """A decomposition was requested for a graph that is too dense; ``witness`` proves it."""

    def __init__(self, message: str, witness: EdgeSet | None = None):
        super().__init__(message)
        self.witness = witness


class InternalConsistencyError(RuntimeError):
    pass


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -- pebble game -----------------------------------------------------------

class PebbleGame:
    """The (k, l) pebble game for 0 <= l < 2k; accepted edges form an independent set.

    Each vertex holds k pebbles.  An accepted edge is covered by a pebble of its
    tail, so the orientation ``head`` records, for every accepted edge, where it points.
    """

    def __init__(self, n: int, k: int, ell: int):
        if not 0 <= ell < 2 * k:
            raise ValueError("pebble game needs 0 <= l < 2k")
        self.n, self.k, self.ell = n, k, ell
        self.pebbles = [k] * n
        self.out: list[dict[int, int]] = [dict() for _ in range(n)]  # tail -> {edge: head}
        self.tail: dict[int, int] = {}

    def copy(self) -> "PebbleGame":
        g = PebbleGame.__new__(PebbleGame)
        g.n, g.k, g.ell = self.n, self.k, self.ell
        g.pebbles = list(self.pebbles)
        g.out = [dict(d) for d in self.out]
        g.tail = dict(self.tail)
        return g

    def _gather(self, target: int, keep: tuple[int, int]) -> tuple[bool, int]:
        """Move one free pebble to ``target`` along a reversed path; returns (ok, reached mask)."""
        parent = {target: None}
        q = deque([target])
        while q:
            x = q.popleft()
            for eid, y in sorted(self.out[x].items()):
                if y in parent:
                    continue
                parent[y] = (x, eid)
                if y not in keep and self.pebbles[y] > 0:
                    # reverse the path target -> ... -> y
                    self.pebbles[y] -= 1
                    cur = y
                    while parent[cur] is not None:
                        px, pe = parent[cur]
                        del self.out[px][pe]
                        self.out[cur][pe] = px
                        self.tail[pe] = cur
                        cur = px
                    self.pebbles[target] += 1
                    return True, 0
                q.append(y)
        return False, sum(1 << x for x in parent)

    def try_insert(self, eid: int, u: int, v: int) -> tuple[bool, int]:
        """Accept edge ``eid`` if independence is preserved; on refusal return the reached vertex mask."""
        need = self.ell + 1
        keep = (u, v)
        while self.pebbles[u] + self.pebbles[v] < need:
            if self.pebbles[u] < self.k and self._gather(u, keep)[0]:
                continue
            if self.pebbles[v] < self.k and self._gather(v, keep)[0]:
                continue
            return False, self._reach(u) | self._reach(v)
        tail = u if self.pebbles[u] > 0 else v
        head = v if tail == u else u
        self.pebbles[tail] -= 1
        self.out[tail][eid] = head
        self.tail[eid] = tail
        return True, 0

    def _reach(self, s: int) -> int:
        seen = {s}
        q = deque([s])
        while q:
            x = q.popleft()
            for y in self.out[x].values():
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        return sum(1 << x for x in seen)

    def delete(self, eid: int) -> None:
        t = self.tail.pop(eid)
        del self.out[t][eid]
        self.pebbles[t] += 1


# -- oracles ----------------------------------------------------------------

class IndependenceOracle:
    """Independence oracle on the edge set of ``host``; subclasses may supply a fast ``circuit``."""

    kind = "generic"

    def __init__(self, host: Graph):
        self.host = host

    def independent_mask(self, mask: int) -> bool:
        raise NotImplementedError

    def independent(self, s: EdgeSet) -> bool:
        s.check_host(self.host)
        return self.independent_mask(s.mask)

    def circuit(self, indep: int, x: int) -> int | None:
        """The unique circuit in ``indep + x`` as a mask, or None if ``indep + x`` is independent."""
        full = indep | (1 << x)
        if self.independent_mask(full):
            return None
        c = 1 << x
        for y in _bits(indep):
            if self.independent_mask(full & ~(1 << y)):
                c |= 1 << y
        return c

    def rank(self, s: EdgeSet) -> int:
        return matroid_rank(self, s)


class GraphicOracle(IndependenceOracle):
    kind = "graphic"

    def independent_mask(self, mask: int) -> bool:
        parent = list(range(self.host.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in _bits(mask):
            u, v = self.host.edges[i]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def circuit(self, indep: int, x: int) -> int | None:
        u, v = self.host.edges[x]
        adj: dict[int, list[tuple[int, int]]] = {}
        for i in _bits(indep):
            a, b = self.host.edges[i]
            adj.setdefault(a, []).append((b, i))
            adj.setdefault(b, []).append((a, i))
        parent = {u: None}
        q = deque([u])
        while q:
            a = q.popleft()
            if a == v:
                break
            for b, i in adj.get(a, ()):
                if b not in parent:
                    parent[b] = (a, i)
                    q.append(b)
        if v not in parent:
            return None
        c = 1 << x
        cur = v
        while parent[cur] is not None:
            a, i = parent[cur]
            c |= 1 << i
            cur = a
        return c


class SparsityOracle(IndependenceOracle):
    """Edge sets whose every subgraph J has e_J <= k(v_J - 2) + 1, i.e. m2 <= k."""

    kind = "sparsity"

    def __init__(self, host: Graph, k: int):
        if k < 1:
            raise ValueError("sparsity parameter must be a positive integer")
        super().__init__(host)
        self.k = k
        self._cache: tuple[int, PebbleGame] | None = None

    def _game(self, mask: int) -> PebbleGame | None:
        if self._cache is not None and self._cache[0] == mask:
            return self._cache[1]
        g = PebbleGame(self.host.n, self.k, 2 * self.k - 1)
        for i in _bits(mask):
            u, v = self.host.edges[i]
            if not g.try_insert(i, u, v)[0]:
                return None
        self._cache = (mask, g)
        return g

    def independent_mask(self, mask: int) -> bool:
        return self._game(mask) is not None

    def circuit(self, indep: int, x: int) -> int | None:
        base = self._game(indep)
        if base is None:
            raise InternalConsistencyError("circuit requested against a dependent set")
        u, v = self.host.edges[x]
        ok, reach = base.copy().try_insert(x, u, v)
        if ok:
            return None
        # the reached vertex set is tight; the circuit lies among the independent edges it spans
        cand = [i for i in _bits(indep)
                if reach >> self.host.edges[i][0] & 1 and reach >> self.host.edges[i][1] & 1]
        c = 1 << x
        for y in cand:
            g = base.copy()
            g.delete(y)
            if g.try_insert(x, u, v)[0]:
                c |= 1 << y
        return c


def make_oracle(host: Graph, kind: str, k: int | None = None) -> IndependenceOracle:
    if kind == "graphic":
        return GraphicOracle(host)
    if kind == "sparsity":
        return SparsityOracle(host, k)
    raise ValueError(f"unknown matroid kind {kind!r}")


def graphic_independent(g: Graph, s: EdgeSet) -> bool:
    return GraphicOracle(g).independent(s)


def graphic_rank(g: Graph, s: EdgeSet) -> int:
    s.check_host(g)
    return s.v - s.components()


def sparsity_independent(g: Graph, s: EdgeSet, k: int) -> bool:
    return SparsityOracle(g, k).independent(s)


def matroid_rank(oracle: IndependenceOracle, s: EdgeSet) -> int:
    """Greedy rank in edge-index order."""
    s.check_host(oracle.host)
    cur = 0
    for i in _bits(s.mask):
        if oracle.independent_mask(cur | (1 << i)):
            cur |= 1 << i
    return bin(cur).count("1")


# -- matroid partition ---------------------------------------------------

@dataclass(frozen=True)
class PartitionOutcome:
    parts: tuple[EdgeSet, ...] | None = None
    certificate: EdgeSet | None = None

    @property
    def ok(self) -> bool:
        return self.parts is not None


def matroid_partition(g: Graph, oracles: list[IndependenceOracle]) -> PartitionOutcome:
    """Partition E(g) into sets independent in the given matroids, or certify impossibility.

    The certificate X satisfies sum_i r_i(X) < |X|.  Both outcomes are re-verified
    through the oracles before returning.
    """
    for o in oracles:
        if o.host != g:
            raise InternalConsistencyError("oracle hosts differ from the partitioned graph")
    parts = [0] * len(oracles)
    for x in range(g.e):
        ok, reach = _augment_path(oracles, parts, x)
        if not ok:
            cert = EdgeSet(g, reach)
            total = sum(matroid_rank(o, cert) for o in oracles)
            if total >= len(cert):
                raise InternalConsistencyError("partition certificate failed re-ranking")
            return PartitionOutcome(certificate=cert)
    result = tuple(EdgeSet(g, m) for m in parts)
    union = 0
    for o, p in zip(oracles, result):
        if union & p.mask or not o.independent(p):
            raise InternalConsistencyError("partition parts failed verification")
        union |= p.mask
    if union != g.full_mask:
        raise InternalConsistencyError("partition parts do not cover the edge set")
    return PartitionOutcome(parts=result)


def _augment_path(oracles, parts: list[int], x: int) -> tuple[bool, int]:
    r = len(oracles)
    owner = {}
    for i, m in enumerate(parts):
        for y in _bits(m):
            owner[y] = i
    # pred[z] = (y, i): z sits in the circuit of y in matroid i, so y may enter part i if z leaves it
    pred: dict[int, tuple[int, int] | None] = {x: None}
    q = deque([x])
    while q:
        y = q.popleft()
        for i in range(r):
            if owner.get(y) == i:
                continue
            c = oracles[i].circuit(parts[i], y)
            if c is None:
                moves = [(y, i)]
                cur = y
                while pred[cur] is not None:
                    prev, j = pred[cur]
                    moves.append((prev, j))
                    cur = prev
                # removals first, then insertions
                for z, j in moves:
                    if z in owner:
                        parts[owner[z]] &= ~(1 << z)
                for z, j in moves:
                    parts[j] |= 1 << z
                return True, 0
            for z in _bits(c & ~(1 << y)):
                if z not in pred:
                    pred[z] = (y, i)
                    q.append(z)
    return False, sum(1 << z for z in pred)


def matroid_partition2(g: Graph, o1: IndependenceOracle, o2: IndependenceOracle) -> PartitionOutcome:
    return matroid_partition(g, [o1, o2])


# -- classical decompositions -----------------------------------------------

def _arboricity_lower_bound(g: Graph) -> int:
    best = 1
    for comp in g.components():
        if len(comp) >= 2:
            sub = g.induced(comp)
            best = max(best, ceil(sub.e / (sub.n - 1)))
    return best


def nash_williams(g: Graph) -> list[EdgeSet]:
    """Partition E(g) into the minimum number of forests, ceil(m1(g))."""
    if g.e == 0:
        raise GraphError("nash_williams needs at least one edge")
    t = _arboricity_lower_bound(g)
    while True:
        out = matroid_partition(g, [GraphicOracle(g) for _ in range(t)])
        if out.ok:
            return list(out.parts)
        t += 1


def hakimi_orientation(g: Graph, k: int) -> dict[int, int]:
    """Orientation (edge -> tail) with every out-degree at most k, by path reversal."""
    tail: dict[int, int] = {}
    out: list[set[int]] = [set() for _ in range(g.n)]
    for eid, (u, v) in enumerate(g.edges):
        placed = False
        for s in (u, v):
            if len(out[s]) < k:
                tail[eid] = s
                out[s].add(eid)
                placed = True
                break
        if placed:
            continue
        parent = {u: None, v: None}
        q = deque([u, v])
        found = None
        while q and found is None:
            a = q.popleft()
            for e2 in sorted(out[a]):
                x, y = g.edges[e2]
                b = y if x == a else x
                if b in parent:
                    continue
                parent[b] = (a, e2)
                if len(out[b]) < k:
                    found = b
                    break
                q.append(b)
        if found is None:
            reached = set(parent)
            wmask = 1 << eid
            for s in reached:
                for e2 in out[s]:
                    wmask |= 1 << e2
            raise InfeasibleError(f"m(G) > {k}", EdgeSet(g, wmask))
        cur = found
        while parent[cur] is not None:
            a, e2 = parent[cur]
            out[a].discard(e2)
            out[cur].add(e2)
            tail[e2] = cur
            cur = a
        tail[eid] = cur
        out[cur].add(eid)
    return tail


def hakimi_pseudoforests(g: Graph, k: int) -> list[EdgeSet]:
    """Split E(g) into k classes, each with every component containing at most one cycle."""
    if k < 1:
        raise ValueError("k must be positive")
    tail = hakimi_orientation(g, k)
    masks = [0] * k
    by_tail: dict[int, list[int]] = {}
    for eid in sorted(tail):
        by_tail.setdefault(tail[eid], []).append(eid)
    for eids in by_tail.values():
        for j, eid in enumerate(eids):
            masks[j] |= 1 << eid
    return [EdgeSet(g, m) for m in masks]


def sparse_witness(j: Graph, k: int) -> EdgeSet:
    """A subgraph J' with m2(J') <= k and e_J <= e_J' + v_J - 1, for m(J) <= k.

    J' is the union of the first k-1 pseudoforest classes and one edge of the last.
    """
    classes = hakimi_pseudoforests(j, k)
    mask = 0
    for c in classes[:-1]:
        mask |= c.mask
    last = classes[-1].mask
    if last:
        mask |= last & -last
    w = EdgeSet(j, mask)
    if not sparsity_independent(j, w, k) or j.e > w.e + max(j.n - 1, 0):
        raise InternalConsistencyError("sparse witness failed verification")
    return w
