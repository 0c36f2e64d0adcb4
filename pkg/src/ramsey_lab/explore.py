"""Exploration of a core by overlapping copies, with balance and pristine-boundary bookkeeping.

Starting from the smallest edge, each step adds an overlapping heavy copy
(degenerate H-step) or an overlapping light copy together with one heavy partner
per new edge (pristine or degenerate L-step).  The balance b(S) = e_S - alpha*v_S
never decreases along the walk; ``verify_trace`` re-checks that and the stopping
inequalities exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Sequence

from .density import BalancedPair, OrderingError, fmt, max_density, two_density
from .graph import EdgeSet, GraphFamily, edge_subgraph
from .ramsey import CoreTuple

H_STEP, PRISTINE, L_STEP = "degenerate-H", "pristine", "degenerate-L"
SCHEMA = "ramsey-lab/1"


class CoreViolationError(ValueError):
    def __init__(self, message: str, edge: int | None = None, copy: EdgeSet | None = None):
        super().__init__(message)
        self.edge = edge
        self.copy = copy


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _vmask(core_g, mask: int) -> int:
    out = 0
    for i in _bits(mask):
        u, v = core_g.edges[i]
        out |= (1 << u) | (1 << v)
    return out


def balance(s: EdgeSet, alpha: Fraction) -> Fraction:
    """b(S) = e_S - alpha * v_S, counting only vertices incident to S."""
    if not s.mask:
        raise ValueError("balance of an empty edge set is undefined")
    return s.e - Fraction(alpha) * s.v


def _subset_extremes(h):
    """(vertex count, max edges) for every proper vertex subset with >= 2 vertices, plus the spanning case."""
    n = h.n
    for mask in range(1, 1 << n):
        k = mask.bit_count()
        if k < 2:
            continue
        if k == n:
            yield n, h.e - 1  # largest proper spanning subgraph
            continue
        e = sum(1 for u, v in h.edges if mask >> u & 1 and mask >> v & 1)
        yield k, e


def compute_delta1(heavy: GraphFamily, alpha: Fraction) -> Fraction:
    """min over H and proper F with v_F >= 2 of (e_H - e_F) - alpha (v_H - v_F); must be positive."""
    alpha = Fraction(alpha)
    best = None
    for h in heavy:
        for vf, ef in _subset_extremes(h):
            val = (h.e - ef) - alpha * (h.n - vf)
            if best is None or val < best:
                best = val
    if best is None or best <= 0:
        raise OrderingError(f"delta1 = {fmt(best)} is not positive; heavy family is not strictly balanced at alpha")
    return best


def compute_X(heavy: GraphFamily, alpha: Fraction) -> Fraction:
    return min(Fraction(h.e - 1) - Fraction(alpha) * (h.n - 2) for h in heavy)


@dataclass(frozen=True)
class ExplorationConfig:
    alpha: Fraction
    gamma: int
    vertex_cap: int
    delta1: Fraction
    X: Fraction

    @property
    def delta(self) -> Fraction:
        return min(self.delta1, Fraction(1))

    @classmethod
    def for_pair(cls, pair: BalancedPair, vertex_cap: int, gamma: int | None = None) -> "ExplorationConfig":
        d1 = compute_delta1(pair.heavy, pair.alpha)
        g = gamma if gamma is not None else ceil(2 * pair.alpha / min(d1, Fraction(1)))
        cfg = cls(pair.alpha, g, vertex_cap, d1, compute_X(pair.heavy, pair.alpha))
        if cfg.X < pair.alpha / pair.m2_light - 1:
            raise OrderingError("X falls below alpha/m2(L) - 1")
        return cfg

    @classmethod
    def relaxed(cls, heavy: GraphFamily, light: GraphFamily, vertex_cap: int, gamma: int) -> "ExplorationConfig":
        """Config for symmetric fixtures where delta1 may vanish; Gamma must be given."""
        m2l = min(two_density(l).value for l in light)
        alpha = min(Fraction(h.e) / (h.n - 2 + 1 / m2l) for h in heavy)
        best = min((h.e - ef) - alpha * (h.n - vf) for h in heavy for vf, ef in _subset_extremes(h))
        return cls(alpha, gamma, vertex_cap, best, compute_X(heavy, alpha))

    def to_json(self) -> dict:
        return {"alpha": fmt(self.alpha), "gamma": self.gamma, "vertex_cap": self.vertex_cap,
                "delta1": fmt(self.delta1), "X": fmt(self.X)}


@dataclass(frozen=True)
class StepRecord:
    index: int
    kind: str
    copy: EdgeSet
    partners: tuple[tuple[int, EdgeSet], ...] = ()
    root: int | None = None
    balance_after: Fraction = Fraction(0)
    boundary_size_after: int = 0
    vertices_after: int = 0
    edges_after: int = 0

    def to_json(self) -> dict:
        return {"step": self.index, "kind": self.kind, "copy": self.copy.indices(),
                "partners": [[e, s.indices()] for e, s in self.partners], "root": self.root,
                "balance": fmt(self.balance_after), "boundary": self.boundary_size_after,
                "vertices": self.vertices_after, "edges": self.edges_after}


@dataclass
class ExplorationTrace:
    core: CoreTuple
    config: ExplorationConfig
    g0: int
    steps: list[StepRecord]
    stop_reason: str
    final_graph: EdgeSet

    @property
    def initial_balance(self) -> Fraction:
        return balance(EdgeSet(self.core.G, 1 << self.g0), self.config.alpha)

    def to_jsonl(self) -> str:
        head = {"schema": SCHEMA, "config": self.config.to_json(), "g0": self.g0,
                "stop_reason": self.stop_reason, "final_graph": self.final_graph.indices(),
                "initial_balance": fmt(self.initial_balance)}
        lines = [json.dumps(head, sort_keys=True)]
        lines.extend(json.dumps(s.to_json(), sort_keys=True) for s in self.steps)
        return "\n".join(lines) + "\n"


def _key(mask: int) -> tuple[int, ...]:
    return tuple(_bits(mask))


def _partner(f_h: Sequence[int], l_mask: int, e: int) -> int | None:
    want = 1 << e
    for h in f_h:
        if h & l_mask == want:
            return h
    return None


def explore_core(core: CoreTuple, config: ExplorationConfig) -> ExplorationTrace:
    g = core.G
    if g.e == 0:
        raise CoreViolationError("core graph has no edges")
    f_h = sorted((s.mask for s in core.F_H), key=_key)
    f_l = sorted((s.mask for s in core.F_L), key=_key)
    alpha = config.alpha
    cur = 1  # the smallest edge
    arrival = {0: 0}
    boundary = 0
    steps: list[StepRecord] = []
    degenerate = 0

    def stop_reason() -> str | None:
        v = _vmask(g, cur).bit_count()
        if v >= config.vertex_cap:
            return "vertex-cap"
        if degenerate >= config.gamma:
            return "gamma"
        if cur == g.full_mask:
            return "exhausted"
        return None

    while (reason := stop_reason()) is None:
        i = len(steps) + 1
        root = None
        partners: list[tuple[int, int]] = []
        hs = [c for c in f_h if c & cur and c & ~cur]
        if hs:
            kind, copy = H_STEP, hs[0]
        else:
            ls = [c for c in f_l if c & cur and c & ~cur]
            if not ls:
                raise CoreViolationError("copy hypergraph is disconnected: no copy overlaps the explored graph")
            cands = []
            cur_v = _vmask(g, cur)
            for c in ls:
                ps = []
                for e in _bits(c & ~cur):
                    h = _partner(f_h, c, e)
                    if h is None:
                        raise CoreViolationError(
                            f"edge {e} of light copy {list(_bits(c))} has no heavy partner meeting it only there",
                            e, EdgeSet(g, c))
                    ps.append((e, h))
                shared = c & cur
                pristine = False
                if shared & (shared - 1) == 0:
                    seen = _vmask(g, c) | cur_v
                    pristine = True
                    for e, h in ps:
                        extra = _vmask(g, h) & ~_vmask(g, 1 << e)
                        if extra & seen:
                            pristine = False
                            break
                        seen |= extra
                cands.append((c, ps, pristine))
            pris = [(arrival[_key(c & cur)[0]], _key(c & cur)[0], _key(c), c, ps)
                    for c, ps, p in cands if p]
            if pris:
                _, root, _, copy, partners = min(pris)
                kind = PRISTINE
            else:
                copy, partners, _ = cands[0]
                kind = L_STEP
        added = copy
        for _, h in partners:
            added |= h
        new_edges = added & ~cur
        touched = _vmask(g, added)
        if kind == PRISTINE:
            u, v = g.edges[root]
            boundary &= ~((1 << u) | (1 << v))
            for e, h in partners:
                boundary |= _vmask(g, h) & ~_vmask(g, copy)
        else:
            boundary &= ~touched
            degenerate += 1
        for e in _bits(new_edges):
            arrival[e] = i
        cur |= added
        s = EdgeSet(g, cur)
        steps.append(StepRecord(i, kind, EdgeSet(g, copy), tuple((e, EdgeSet(g, h)) for e, h in partners),
                                root, balance(s, alpha), boundary.bit_count(), s.v, s.e))
    return ExplorationTrace(core, config, 0, steps, reason, EdgeSet(g, cur))


# -- verification --------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    kind: str
    step: int | None
    detail: str


@dataclass
class TraceReport:
    findings: list[Finding] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    stop_case: str = ""

    @property
    def ok(self) -> bool:
        return not self.findings

    def to_json(self) -> dict:
        return {"ok": self.ok, "stop_case": self.stop_case,
                "findings": [{"kind": f.kind, "step": f.step, "detail": f.detail} for f in self.findings],
                "notes": self.notes}


def _is_triangle(s: EdgeSet) -> bool:
    return s.e == 3 and s.v == 3


def pristine_increments(trace: ExplorationTrace) -> list[int | None]:
    """Y_i = sum over partners of (v_H - 2) for pristine steps, None for degenerate ones."""
    return [sum(h.v - 2 for _, h in st.partners) if st.kind == PRISTINE else None for st in trace.steps]


def pristine_boundary(trace: ExplorationTrace) -> list[int]:
    """|boundary| after each step, recomputed from the step records."""
    g = trace.core.G
    bd = 0
    sizes = []
    for st in trace.steps:
        if st.kind == PRISTINE:
            u, v = g.edges[st.root]
            bd &= ~((1 << u) | (1 << v))
            cv = st.copy.vertex_mask()
            for _, h in st.partners:
                bd |= h.vertex_mask() & ~cv
        else:
            touched = st.copy.vertex_mask()
            for _, h in st.partners:
                touched |= h.vertex_mask()
            bd &= ~touched
        sizes.append(bd.bit_count())
    return sizes


def verify_trace(trace: ExplorationTrace, config: ExplorationConfig | None = None) -> TraceReport:
    cfg = config or trace.config
    a = cfg.alpha
    rep = TraceReport()
    g = trace.core.G
    b0 = trace.initial_balance
    if b0 != 1 - 2 * a:
        rep.findings.append(Finding("initial-balance", 0, f"b(G0) = {fmt(b0)} != 1 - 2 alpha"))
    prev = b0
    cur = 1 << trace.g0
    all_degenerate_strong = True
    for st in trace.steps:
        added = st.copy.mask
        for _, h in st.partners:
            added |= h.mask
        cur |= added
        b = balance(EdgeSet(g, cur), a)
        if b != st.balance_after:
            rep.findings.append(Finding("record", st.index, "recorded balance differs from recomputation"))
        gain = b - prev
        if gain < 0:
            rep.findings.append(Finding("monotone", st.index, f"balance dropped by {fmt(-gain)}"))
        if st.kind == H_STEP and gain < cfg.delta1:
            rep.findings.append(Finding("delta1", st.index, f"H-step gained {fmt(gain)} < delta1 = {fmt(cfg.delta1)}"))
        if st.kind == L_STEP and gain <= 0:
            rep.findings.append(Finding("strict-L", st.index, f"degenerate L-step gained {fmt(gain)}"))
        if st.kind != PRISTINE and gain < cfg.delta:
            all_degenerate_strong = False
        prev = b
    if cur != trace.final_graph.mask:
        rep.findings.append(Finding("record", None, "final graph differs from the union of steps"))
    sizes = pristine_boundary(trace)
    for st, y, size in zip(trace.steps, pristine_increments(trace), sizes):
        if st.boundary_size_after != size:
            rep.findings.append(Finding("record", st.index, "recorded boundary differs from recomputation"))
        if y is not None and y < 3:
            exempt = _is_triangle(st.copy) and any(_is_triangle(h) for _, h in st.partners)
            if not exempt:
                rep.findings.append(Finding("pristine-Y", st.index, f"Y = {y} < 3"))
    s = trace.final_graph
    if trace.stop_reason == "vertex-cap":
        rep.stop_case = "i"
        if s.e < a * (s.v - 2):
            rep.findings.append(Finding("case-i", None, f"e = {s.e} < alpha (v - 2)"))
    elif trace.stop_reason == "gamma":
        rep.stop_case = "ii"
        if all_degenerate_strong and cfg.gamma * cfg.delta >= 2 * a:
            if s.e < a * s.v + 1:
                rep.findings.append(Finding("case-ii", None, f"e = {s.e} < alpha v + 1"))
        else:
            rep.notes.append("case (ii) inequality not asserted: a degenerate step gained less than delta "
                             "or Gamma * delta < 2 alpha")
    else:
        rep.stop_case = "iii"
        m = max_density(edge_subgraph(g, s)).value
        rep.notes.append(f"exhausted: m(S) = {fmt(m)} {'>' if m > a else '<='} alpha")
    return rep
