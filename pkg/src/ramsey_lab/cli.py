"""Command-line entry point: ``ramsey-lab <command> ...``.

Every command writes one JSON document (or CSV table) to stdout or ``--output``.
Outputs carry ``"schema": "ramsey-lab/1"`` and contain no timestamps, so identical
inputs and flags give byte-identical files regardless of ``--workers``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .decompose import (BudgetError, anti_ramsey_coloring, applicable_cases, conjecture_search,
                        verify_coloring, verify_forest)
from .density import (BalancedPair, check_numeric_lemmas, fmt, is_strictly_mixed_balanced,
                      is_strictly_two_balanced, max_density, mixed_density, one_density, two_density)
from .explore import ExplorationConfig, explore_core, verify_trace
from .fixtures import FixtureError, load_fixture
from .graph import (Graph, Graph6DecodeError, GraphError, parse_family, parse_graph6, read_graph6_stream,
                    sample_gnp, write_graph6)
from .matroid import InfeasibleError
from .ramsey import BudgetExceeded, ramsey_decide

SCHEMA = "ramsey-lab/1"
DEFAULT_C_GRID = tuple(0.25 * 2 ** (k / 2) for k in range(9))  # 0.25 ... 4, geometric


# -- helpers ---------------------------------------------------------------

def _read_graphs(source: str | None) -> list[Graph]:
    if source in (None, "-"):
        return list(read_graph6_stream(sys.stdin))
    with open(source) as fh:
        return list(read_graph6_stream(fh))


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    """Ordered map; results are merged in input order whatever the worker count."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _emit(args, doc: dict, rows: list[dict] | None = None) -> None:
    if args.format == "csv":
        if rows is None:
            raise SystemExit("this command has no tabular form; use --format json")
        buf = io.StringIO()
        fields: list[str] = []
        for r in rows:
            fields.extend(k for k in r if k not in fields)
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (" ".join(map(str, v)) if isinstance(v, list) else v) for k, v in r.items()})
        text = buf.getvalue()
    else:
        text = json.dumps({"schema": SCHEMA, **doc}, sort_keys=True, indent=1) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for k successes in n trials (95% by default)."""
    if n == 0:
        return 0.0, 1.0
    ph = k / n
    denom = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / denom
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


def _pair(args) -> BalancedPair:
    heavy, light = parse_family(args.heavy), parse_family(args.light)
    return BalancedPair.from_families(heavy, light, relaxed=args.relaxed)


# -- density ------------------------------------------------------------------

def _density_row(g: Graph) -> dict:
    row = {"graph6": write_graph6(g), "n": g.n, "e": g.e}
    if g.n >= 1:
        d = max_density(g)
        row["m"], row["m_witness"] = fmt(d.value), d.witness.indices()
    if g.n >= 2:
        d = one_density(g)
        row["m1"], row["m1_witness"] = fmt(d.value), d.witness.indices()
    d = two_density(g)
    row["m2"], row["m2_witness"] = fmt(d.value), d.witness.indices()
    return row


def cmd_density(args) -> int:
    rows = [_density_row(g) for g in _read_graphs(args.input)]
    doc: dict = {"command": "density", "results": rows}
    if args.heavy and args.light:
        pair = _pair(args)
        rep = check_numeric_lemmas(pair) if pair.m2_light < pair.m2_heavy else None
        doc["pair"] = {
            "heavy": args.heavy, "light": args.light,
            "alpha": fmt(pair.alpha), "m2_heavy": fmt(pair.m2_heavy), "m2_light": fmt(pair.m2_light),
            "light_strictly_2_balanced": [is_strictly_two_balanced(l)[0] for l in pair.light],
            "heavy_strictly_mixed_balanced": [is_strictly_mixed_balanced(h, pair.m2_light)[0] for h in pair.heavy],
            "mixed_by_member": [fmt(mixed_density(h, pair.m2_light).value) for h in pair.heavy],
            "lemmas": None if rep is None else {
                "ok": rep.ok,
                "summary": {k: {"checked": v["checked"], "failed": v["failed"], "min_slack": fmt(v["min_slack"])}
                            for k, v in sorted(rep.summary().items())}},
        }
    _emit(args, doc, rows)
    return 0


# -- decompose ------------------------------------------------------------------

def cmd_decompose(args) -> int:
    pair = _pair(args)
    report = applicable_cases(pair)
    rows = []
    for g in _read_graphs(args.input):
        row = {"graph6": write_graph6(g), "m": fmt(max_density(g).value) if g.n else "0"}
        try:
            out = anti_ramsey_coloring(g, pair, report)
        except InfeasibleError as exc:
            row.update(status="refused", reason=str(exc))
        else:
            if out is None:
                row.update(status="no-case")
            else:
                ok, _ = verify_coloring(g, out, pair)
                row.update(status="colored", **out.to_json(verified=ok))
        rows.append(row)
    _emit(args, {"command": "decompose", "cases": report.to_json(), "results": rows}, rows)
    return 0


# -- ramsey ------------------------------------------------------------------------

def cmd_ramsey(args) -> int:
    fams = [parse_family(s) for s in args.families]
    rows = []
    for g in _read_graphs(args.input):
        row = {"graph6": write_graph6(g)}
        try:
            res = ramsey_decide(g, fams, args.budget_nodes)
        except BudgetExceeded:
            row["verdict"] = "budget"
        else:
            row["verdict"] = "ramsey" if res.is_ramsey else "not-ramsey"
            row["nodes"] = res.nodes
            if res.witness is not None:
                row["witness"] = list(res.witness)
        rows.append(row)
    _emit(args, {"command": "ramsey", "families": args.families, "results": rows}, rows)
    return 0


# -- conjecture scan ------------------------------------------------------------------

def _scan_one(item: tuple[int, str, int]) -> dict:
    idx, g6, budget = item
    g = parse_graph6(g6)
    row = {"index": idx, "graph6": g6}
    try:
        res = conjecture_search(g, budget)
    except BudgetError:
        row["verdict"] = "budget"
        return row
    row["target"] = fmt(res.target)
    row["method"] = res.method
    if res.found:
        row["verdict"] = "forest"
        row["forest"] = res.forest.indices()
        row["verified"] = verify_forest(g, res.forest, res.target)
    else:
        # re-run twice before reporting a counterexample
        again = [conjecture_search(g, budget).found for _ in range(2)]
        row["verdict"] = "COUNTEREXAMPLE" if not any(again) else "inconsistent"
    return row


def cmd_conjecture_scan(args) -> int:
    graphs = _read_graphs(args.input)
    items = [(i, write_graph6(g), args.budget_edges) for i, g in enumerate(graphs)]
    rows = _pmap(_scan_one, items, args.workers)
    counts: dict[str, int] = {}
    for r in rows:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    _emit(args, {"command": "conjecture-scan", "counts": counts, "results": rows}, rows)
    return 3 if counts.get("COUNTEREXAMPLE") or counts.get("inconsistent") else 0


# -- explore -------------------------------------------------------------------------

def cmd_explore(args) -> int:
    try:
        core, relaxed = load_fixture(args.fixture)
    except (FixtureError, GraphError, OSError, json.JSONDecodeError) as exc:
        print(f"ramsey-lab explore: {exc}", file=sys.stderr)
        return 2
    cap = args.vertex_cap if args.vertex_cap is not None else core.G.n + 1
    if relaxed:
        cfg = ExplorationConfig.relaxed(core.heavy, core.light, cap, args.gamma or 10 ** 6)
    else:
        pair = BalancedPair.from_families(core.heavy, core.light)
        cfg = ExplorationConfig.for_pair(pair, cap, args.gamma)
    trace = explore_core(core, cfg)
    rep = verify_trace(trace)
    steps = [s.to_json() for s in trace.steps]
    doc = {"command": "explore", "config": cfg.to_json(), "g0": trace.g0, "stop_reason": trace.stop_reason,
           "initial_balance": fmt(trace.initial_balance), "final_graph": trace.final_graph.indices(),
           "steps": steps, "report": rep.to_json()}
    _emit(args, doc, steps)
    return 0 if rep.ok else 1


# -- Monte Carlo threshold ----------------------------------------------------------------

def _mc_trial(item) -> str:
    n, p, entropy, key, heavy, light, budget = item
    seed = np.random.SeedSequence(entropy, spawn_key=key)
    g = sample_gnp(n, p, seed)
    try:
        return "R" if ramsey_decide(g, [parse_family(heavy), parse_family(light)], budget) else "N"
    except BudgetExceeded:
        return "B"


def threshold_table(heavy: str, light: str, ns: Sequence[int], c_grid: Sequence[float], trials: int,
                    seed: int, workers: int = 1, budget: int | None = None) -> list[dict]:
    """Rows (n, c, p, trials, ramsey_count, fraction, Wilson interval) with p = min(1, c n^(-1/alpha)).

    Each n also gets a p = 0 and a p = 1 row.  Trial seeds come from
    SeedSequence(seed, spawn_key=(n index, p index, trial index)).
    """
    pair = BalancedPair.from_families(parse_family(heavy), parse_family(light), relaxed=True)
    inv = 1 / (pair.alpha.numerator / pair.alpha.denominator)
    cells = []
    for ni, n in enumerate(ns):
        ps = [(None, 0.0)] + [(c, min(1.0, c * n ** (-inv))) for c in c_grid] + [(None, 1.0)]
        for pi, (c, p) in enumerate(ps):
            cells.append((ni, n, pi, c, p))
    items = [(n, p, seed, (ni, pi, ti), heavy, light, budget) for ni, n, pi, c, p in cells for ti in range(trials)]
    verdicts = _pmap(_mc_trial, items, workers)
    rows = []
    for j, (ni, n, pi, c, p) in enumerate(cells):
        vs = verdicts[j * trials:(j + 1) * trials]
        row = {"n": n, "c": "" if c is None else f"{c:.6g}", "p": f"{p:.6g}", "trials": trials}
        if "B" in vs:
            row.update(status="budget", ramsey_count="", fraction="", ci_low="", ci_high="")
        else:
            k = vs.count("R")
            lo, hi = wilson_interval(k, trials)
            row.update(status="ok", ramsey_count=k, fraction=f"{k / trials:.6g}",
                       ci_low=f"{lo:.6g}", ci_high=f"{hi:.6g}")
        rows.append(row)
    return rows


def cmd_mc_threshold(args) -> int:
    grid = args.c_grid if args.c_grid else DEFAULT_C_GRID
    rows = threshold_table(args.heavy, args.light, args.n, grid, args.trials, args.seed, args.workers,
                           args.budget_nodes)
    doc = {"command": "mc-threshold", "heavy": args.heavy, "light": args.light, "seed": args.seed,
           "rows": rows}
    _emit(args, doc, rows)
    return 0


# -- parser -----------------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--budget-nodes", type=_positive, default=None, help="node budget for Ramsey search")
    common.add_argument("--budget-edges", type=_positive, default=24, help="edge budget for conjecture search")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None)

    p = argparse.ArgumentParser(prog="ramsey-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", parents=[common], help="m, m1, m2 of graph6 input; pair report")
    d.add_argument("input", nargs="?", default="-")
    d.add_argument("--heavy")
    d.add_argument("--light")
    d.add_argument("--relaxed", action="store_true")
    d.set_defaults(func=cmd_density)

    dc = sub.add_parser("decompose", parents=[common], help="colour graphs avoiding a pair")
    dc.add_argument("input", nargs="?", default="-")
    dc.add_argument("--heavy", required=True)
    dc.add_argument("--light", required=True)
    dc.add_argument("--relaxed", action="store_true")
    dc.set_defaults(func=cmd_decompose)

    r = sub.add_parser("ramsey", parents=[common], help="decide Ramsey properties")
    r.add_argument("input", nargs="?", default="-")
    r.add_argument("--families", nargs="+", required=True, help="one family spec per colour")
    r.set_defaults(func=cmd_ramsey)

    c = sub.add_parser("conjecture-scan", parents=[common], help="search forests F with m2(G-F) <= m(G)")
    c.add_argument("input", nargs="?", default="-")
    c.set_defaults(func=cmd_conjecture_scan)

    e = sub.add_parser("explore", parents=[common], help="explore a core fixture")
    e.add_argument("fixture")
    e.add_argument("--vertex-cap", type=_positive, default=None)
    e.add_argument("--gamma", type=_positive, default=None)
    e.set_defaults(func=cmd_explore)

    m = sub.add_parser("mc-threshold", parents=[common], help="Monte-Carlo Ramsey fractions in G(n,p)")
    m.add_argument("--heavy", required=True)
    m.add_argument("--light", required=True)
    m.add_argument("--n", type=int, nargs="+", required=True)
    m.add_argument("--trials", type=_positive, default=200)
    m.add_argument("--c-grid", type=float, nargs="+", default=None)
    m.set_defaults(func=cmd_mc_threshold)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Graph6DecodeError as exc:
        print(f"ramsey-lab {args.command}: graph6 error: {exc}", file=sys.stderr)
        return 2
    except (GraphError, OSError) as exc:
        print(f"ramsey-lab {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
