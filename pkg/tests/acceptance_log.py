"""Collects one pass/fail record per acceptance criterion."""

import functools
import time

RESULTS: dict[int, tuple[str, bool, float, str]] = {}


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs) or ""
            except BaseException as exc:
                RESULTS[number] = (title, False, time.perf_counter() - t0, f"{type(exc).__name__}: {exc}"[:200])
                raise
            RESULTS[number] = (title, True, time.perf_counter() - t0, str(detail))
        return run
    return wrap


def lines() -> list[str]:
    out = []
    for n in sorted(RESULTS):
        title, ok, secs, detail = RESULTS[n]
        tail = f" -- {detail}" if detail else ""
        out.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {title} ({secs:.1f}s){tail}")
    return out
