"""Small-graph catalogs: every graph up to 7 vertices and every connected graph on 8."""

from __future__ import annotations

from itertools import combinations
from pathlib import Path
from typing import Iterator

import networkx as nx

from .graph import Graph, read_graph6_stream, write_graph6


def _from_nx(h: nx.Graph) -> Graph:
    mapping = {v: i for i, v in enumerate(sorted(h.nodes()))}
    return Graph.from_edges(len(mapping), sorted(tuple(sorted((mapping[a], mapping[b]))) for a, b in h.edges()))


def atlas_graphs(max_n: int = 7, min_n: int = 1) -> list[Graph]:
    """All isomorphism classes on min_n..max_n vertices (max_n <= 7), in atlas order."""
    if max_n > 7:
        raise ValueError("the atlas stops at 7 vertices")
    return [_from_nx(h) for h in nx.graph_atlas_g() if min_n <= h.number_of_nodes() <= max_n]


def connected_graphs(n: int) -> list[Graph]:
    """Connected isomorphism classes on exactly n vertices (n <= 8)."""
    if n <= 7:
        return [g for g in atlas_graphs(n, n) if g.is_connected()]
    if n != 8:
        raise ValueError("only n <= 8 is supported")
    # every connected graph on 8 vertices has a non-cut vertex; removing it leaves a connected 7-vertex graph
    buckets: dict[str, list[nx.Graph]] = {}
    out: list[Graph] = []
    for base in connected_graphs(7):
        for r in range(1, 8):
            for nb in combinations(range(7), r):
                h = base.to_networkx()
                h.add_node(7)
                h.add_edges_from((7, x) for x in nb)
                key = nx.weisfeiler_lehman_graph_hash(h, iterations=4)
                bucket = buckets.setdefault(key, [])
                if any(nx.is_isomorphic(h, other) for other in bucket):
                    continue
                bucket.append(h)
                out.append(_from_nx(h))
    return out


def write_catalog(path: str | Path, graphs) -> None:
    Path(path).write_text("".join(write_graph6(g) + "\n" for g in graphs))


def read_catalog(path: str | Path) -> Iterator[Graph]:
    with open(path) as fh:
        yield from read_graph6_stream(fh)
