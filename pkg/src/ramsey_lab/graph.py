"""Simple labeled graphs with canonical edge indexing, graph6 I/O and G(n, p) sampling.

Vertices are ``0..n-1``.  Edges are stored as sorted ``(u, v)`` pairs with
``u < v``; the position of a pair in ``Graph.edges`` is its *edge index*, and
that index is the currency used by :class:`EdgeSet`, colorings and matroids.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np


class GraphError(ValueError):
    """Base class for malformed graphs and bad parameters."""


class Graph6DecodeError(GraphError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.reason = message
        self.offset = offset


class HostMismatchError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    # original vertex labels when this graph was cut out of a larger one
    labels: tuple[int, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("negative vertex count")
        prev = None
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise GraphError(f"bad edge {(u, v)} for n={self.n}")
            if prev is not None and (u, v) <= prev:
                raise GraphError("edge list must be strictly sorted (no parallel edges)")
            prev = (u, v)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], labels=None) -> "Graph":
        pairs = set()
        for a, b in edges:
            if a == b:
                raise GraphError(f"loop at vertex {a}")
            pairs.add((min(a, b), max(a, b)))
        return cls(n, tuple(sorted(pairs)), None if labels is None else tuple(labels))

    # -- derived views -------------------------------------------------

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> tuple[int, ...]:
        """Neighbourhood of each vertex as a bitmask."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        nbrs = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {uv: i for i, uv in enumerate(self.edges)}

    @cached_property
    def incident(self) -> tuple[int, ...]:
        """Bitmask of incident edge indices per vertex."""
        inc = [0] * self.n
        for i, (u, v) in enumerate(self.edges):
            inc[u] |= 1 << i
            inc[v] |= 1 << i
        return tuple(inc)

    @property
    def full_mask(self) -> int:
        return (1 << self.e) - 1

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def degrees(self) -> list[int]:
        return [len(s) for s in self.neighbors]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_index

    def index_of(self, u: int, v: int) -> int:
        return self.edge_index[(min(u, v), max(u, v))]

    def all_edges(self) -> "EdgeSet":
        return EdgeSet(self, self.full_mask)

    def edge_set(self, indices: Iterable[int]) -> "EdgeSet":
        return EdgeSet.of(self, indices)

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            stack, comp = [s], []
            seen[s] = True
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self.neighbors[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def complement(self) -> "Graph":
        present = set(self.edges)
        return Graph(self.n, tuple(p for p in combinations(range(self.n), 2) if p not in present))

    def delete_edges(self, indices: Iterable[int]) -> "Graph":
        drop = set(indices)
        return Graph(self.n, tuple(uv for i, uv in enumerate(self.edges) if i not in drop), self.labels)

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph, relabelled to ``0..k-1`` in vertex order."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        es = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph(len(vs), tuple(sorted(es)), tuple(vs))

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def __str__(self) -> str:
        return f"Graph(n={self.n}, e={self.e})"


@dataclass(frozen=True)
class EdgeSet:
    """A subset of a host graph's edges, stored as a bitmask over edge indices."""

    host: Graph
    mask: int = 0

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.host.e:
            raise GraphError("edge index out of range for host")

    @classmethod
    def of(cls, host: Graph, indices: Iterable[int]) -> "EdgeSet":
        m = 0
        for i in indices:
            if not 0 <= i < host.e:
                raise GraphError(f"edge index {i} out of range (host has {host.e} edges)")
            m |= 1 << i
        return cls(host, m)

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    def indices(self) -> list[int]:
        return list(self)

    def check_host(self, g: Graph) -> None:
        if self.host != g:
            raise HostMismatchError("edge set belongs to a different host graph")

    def _same(self, other: "EdgeSet") -> None:
        if self.host != other.host:
            raise HostMismatchError("edge sets on different hosts")

    def __or__(self, other: "EdgeSet") -> "EdgeSet":
        self._same(other)
        return EdgeSet(self.host, self.mask | other.mask)

    def __and__(self, other: "EdgeSet") -> "EdgeSet":
        self._same(other)
        return EdgeSet(self.host, self.mask & other.mask)

    def __sub__(self, other: "EdgeSet") -> "EdgeSet":
        self._same(other)
        return EdgeSet(self.host, self.mask & ~other.mask)

    def complement(self) -> "EdgeSet":
        return EdgeSet(self.host, self.host.full_mask & ~self.mask)

    def pairs(self) -> list[tuple[int, int]]:
        return [self.host.edges[i] for i in self]

    def vertex_mask(self) -> int:
        vm = 0
        for u, v in self.pairs():
            vm |= (1 << u) | (1 << v)
        return vm

    def vertices(self) -> list[int]:
        return sorted({x for uv in self.pairs() for x in uv})

    @property
    def v(self) -> int:
        """Number of vertices incident to the set (isolated vertices do not count)."""
        return self.vertex_mask().bit_count()

    @property
    def e(self) -> int:
        return len(self)

    def components(self) -> int:
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.pairs():
            parent.setdefault(u, u)
            parent.setdefault(v, v)
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        return sum(1 for x in parent if find(x) == x)

    def key(self) -> tuple[int, ...]:
        """Sort key: the sorted tuple of edge indices."""
        return tuple(self)


@dataclass(frozen=True)
class GraphFamily:
    members: tuple[Graph, ...]
    name: str = ""

    def __post_init__(self):
        if not self.members:
            raise GraphError("a graph family needs at least one member")
        for g in self.members:
            if g.e == 0:
                raise GraphError("family members must have at least one edge")

    @classmethod
    def of(cls, *members: Graph, name: str = "") -> "GraphFamily":
        return cls(tuple(members), name or "{" + ",".join(str(m) for m in members) + "}")

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def union(self, other: "GraphFamily") -> "GraphFamily":
        return GraphFamily(self.members + other.members, f"{self.name}|{other.name}")


def edge_subgraph(g: Graph, s: EdgeSet) -> Graph:
    """The graph formed by the edges of ``s``; isolated vertices are dropped.

    ``labels`` on the result maps new vertex ids back to ``g``'s vertices.
    """
    s.check_host(g)
    vs = s.vertices()
    pos = {v: i for i, v in enumerate(vs)}
    es = sorted((pos[u], pos[v]) for u, v in s.pairs())
    base = g.labels
    labels = tuple(base[v] for v in vs) if base is not None else tuple(vs)
    return Graph(len(vs), tuple(es), labels)


# -- graph6 --------------------------------------------------------------

def _encode_n(n: int) -> list[int]:
    if n <= 62:
        return [n]
    if n <= 258047:
        return [63, (n >> 12) & 63, (n >> 6) & 63, n & 63]
    if n <= 68719476735:
        return [63, 63] + [(n >> s) & 63 for s in range(30, -1, -6)]
    raise GraphError("graph too large for graph6")


def write_graph6(g: Graph) -> str:
    bits = []
    adj = g.adj
    for j in range(1, g.n):
        for i in range(j):
            bits.append(adj[i] >> j & 1)
    bits.extend([0] * (-len(bits) % 6))
    data = _encode_n(g.n)
    for k in range(0, len(bits), 6):
        chunk = bits[k:k + 6]
        data.append(int("".join(map(str, chunk)), 2))
    return "".join(chr(x + 63) for x in data)


def parse_graph6(text: str) -> Graph:
    line = text.strip()
    if line.startswith(">>graph6<<"):
        line = line[10:]
    if not line:
        raise Graph6DecodeError("empty graph6 string", 0)
    vals = []
    for i, ch in enumerate(line):
        c = ord(ch)
        if not 63 <= c <= 126:
            raise Graph6DecodeError(f"character {ch!r} outside graph6 range", i)
        vals.append(c - 63)
    if vals[0] != 63:
        n, pos = vals[0], 1
    elif len(vals) >= 2 and vals[1] != 63:
        if len(vals) < 4:
            raise Graph6DecodeError("truncated vertex count", len(vals))
        n, pos = (vals[1] << 12) | (vals[2] << 6) | vals[3], 4
    else:
        if len(vals) < 8:
            raise Graph6DecodeError("truncated vertex count", len(vals))
        n = 0
        for x in vals[2:8]:
            n = (n << 6) | x
        pos = 8
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    if len(vals) - pos != nbytes:
        off = pos + min(len(vals) - pos, nbytes)
        raise Graph6DecodeError(f"expected {nbytes} data bytes for n={n}, got {len(vals) - pos}", off)
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            byte = vals[pos + k // 6]
            if byte >> (5 - k % 6) & 1:
                edges.append((i, j))
            k += 1
    if nbits % 6:
        last = vals[pos + nbytes - 1]
        if last & ((1 << (6 - nbits % 6)) - 1):
            raise Graph6DecodeError("nonzero padding bits", pos + nbytes - 1)
    return Graph(n, tuple(sorted(edges)))


def read_graph6_stream(lines: Iterable[str]) -> Iterator[Graph]:
    """Yield graphs from a newline-delimited graph6 stream, skipping blank lines."""
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            yield parse_graph6(line)
        except Graph6DecodeError as exc:
            raise Graph6DecodeError(f"line {lineno}: {exc.reason}", exc.offset) from None


# -- constructions -------------------------------------------------------

def complete(k: int) -> Graph:
    if k < 1:
        raise GraphError("complete graph needs k >= 1")
    return Graph(k, tuple(combinations(range(k), 2)))


def cycle(k: int) -> Graph:
    if k < 3:
        raise GraphError("cycle needs k >= 3")
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def path(k: int) -> Graph:
    """Path on ``k`` vertices."""
    if k < 1:
        raise GraphError("path needs k >= 1")
    return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def complete_multipartite(parts: Sequence[int]) -> Graph:
    if not parts or any(p < 1 for p in parts):
        raise GraphError("parts must be positive")
    owner = [i for i, p in enumerate(parts) for _ in range(p)]
    n = len(owner)
    return Graph(n, tuple((u, v) for u, v in combinations(range(n), 2) if owner[u] != owner[v]))


def biclique(s: int, t: int) -> Graph:
    return complete_multipartite([s, t])


def make_named(kind: str, *params: int) -> Graph:
    kind = kind.lower()
    if kind == "complete":
        return complete(*params)
    if kind == "cycle":
        return cycle(*params)
    if kind == "path":
        return path(*params)
    if kind == "biclique":
        return biclique(*params)
    if kind == "complete_multipartite":
        return complete_multipartite(params)
    raise GraphError(f"unknown graph kind {kind!r}")


_SPEC_RE = re.compile(r"^([KCP])(\d+(?:,\d+)*)$")


def parse_graph_spec(spec: str) -> Graph:
    """Parse names like ``K4``, ``C8``, ``P5``, ``K3,3`` or ``K3,3,3,3``."""
    m = _SPEC_RE.match(spec.strip())
    if not m:
        raise GraphError(f"cannot parse graph name {spec!r}")
    letter, nums = m.group(1), [int(x) for x in m.group(2).split(",")]
    if letter == "K":
        return complete(nums[0]) if len(nums) == 1 else complete_multipartite(nums)
    if len(nums) != 1:
        raise GraphError(f"{spec!r}: only K takes several parts")
    return cycle(nums[0]) if letter == "C" else path(nums[0])


def parse_family(spec: str) -> GraphFamily:
    """Family spec: ``+``-separated names, or ``@file.g6`` for a graph6 file."""
    spec = spec.strip()
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            members = tuple(read_graph6_stream(fh))
        return GraphFamily(members, spec)
    return GraphFamily(tuple(parse_graph_spec(p) for p in spec.split("+")), spec)


# -- random graphs -------------------------------------------------------

def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """Binomial random graph; pairs are visited in lexicographic order."""
    if not 0.0 <= p <= 1.0:
        raise GraphError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(n), 2))
    draws = rng.random(len(pairs))
    return Graph(n, tuple(uv for uv, x in zip(pairs, draws) if x < p))
