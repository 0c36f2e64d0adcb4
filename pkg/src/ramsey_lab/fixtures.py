"""Core fixtures: a hand-checkable family of cores and the JSON fixture format."""

from __future__ import annotations

import json
from pathlib import Path

from .graph import EdgeSet, Graph, parse_family, parse_graph6, write_graph6
from .ramsey import CoreTuple, is_core


def rook_core(a: int, b: int) -> CoreTuple:
    """The rook's graph K_a x K_b with its row/column cliques as heavy copies and its
    rectangles (two row edges, two column edges) as light C4 copies.

    Every edge lies in exactly one clique, so explorations of it mix pristine and
    degenerate steps.  Heavy family {K_a, K_b}, light family {C4}.
    """
    if a < 3 or b < 3:
        raise ValueError("rook cores need both sides at least 3")
    idx = lambda i, j: i * b + j  # noqa: E731
    edges = set()
    for i in range(a):
        for j in range(b):
            edges.update((idx(i, j), idx(i, j2)) for j2 in range(j + 1, b))
            edges.update((idx(i, j), idx(i2, j)) for i2 in range(i + 1, a))
    g = Graph.from_edges(a * b, sorted(edges))
    at = g.index_of
    rows = [EdgeSet.of(g, [at(idx(i, j), idx(i, j2)) for j in range(b) for j2 in range(j + 1, b)])
            for i in range(a)]
    cols = [EdgeSet.of(g, [at(idx(i, j), idx(i2, j)) for i in range(a) for i2 in range(i + 1, a)])
            for j in range(b)]
    rects = [EdgeSet.of(g, [at(idx(i, j), idx(i, j2)), at(idx(i2, j), idx(i2, j2)),
                            at(idx(i, j), idx(i2, j)), at(idx(i, j2), idx(i2, j2))])
             for i in range(a) for i2 in range(i + 1, a) for j in range(b) for j2 in range(j + 1, b)]
    heavy = parse_family(f"K{a}" if a == b else f"K{a}+K{b}")
    light = parse_family("C4")
    return CoreTuple(g, tuple(rows + cols), tuple(rects), heavy, light)


def core_to_fixture(core: CoreTuple, relaxed: bool = False) -> dict:
    return {"graph6": write_graph6(core.G), "heavy": core.heavy.name, "light": core.light.name,
            "F_H": [s.indices() for s in core.F_H], "F_L": [s.indices() for s in core.F_L],
            "relaxed": relaxed}


class FixtureError(ValueError):
    pass


def core_from_fixture(data: dict, validate: bool = True) -> tuple[CoreTuple, bool]:
    """Parse a fixture dict; returns (core, relaxed flag)."""
    try:
        g = parse_graph6(data["graph6"])
        heavy, light = parse_family(data["heavy"]), parse_family(data["light"])
        f_h = tuple(EdgeSet.of(g, c) for c in data["F_H"])
        f_l = tuple(EdgeSet.of(g, c) for c in data["F_L"])
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise FixtureError(f"malformed fixture: {exc!r}") from None
    core = CoreTuple(g, f_h, f_l, heavy, light)
    if validate:
        ok, cond, why = is_core(core)
        if not ok:
            raise FixtureError(f"fixture is not a core (condition {cond}): {why}")
    return core, bool(data.get("relaxed", False))


def load_fixture(path: str | Path, validate: bool = True) -> tuple[CoreTuple, bool]:
    with open(path) as fh:
        return core_from_fixture(json.load(fh), validate)


def dump_fixture(core: CoreTuple, path: str | Path, relaxed: bool = False) -> None:
    Path(path).write_text(json.dumps(core_to_fixture(core, relaxed), sort_keys=True) + "\n")
