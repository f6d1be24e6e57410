"""Canonical JSON reports and the worker-pool helper.

Reports are serialized with sorted keys, two-space indentation, and a
trailing newline, and contain only ints, strings, bools, lists, and dicts,
so identical runs produce byte-identical files.  Wallclock is attached only
when explicitly requested, to keep the default output deterministic.
"""

from __future__ import annotations

import json
import multiprocessing
import os

from . import CONVENTIONS, __version__

WORKERS_ENV = "FANOLAB_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def make_report(command: str, config: dict, results, warnings=None, wallclock=None) -> dict:
    report = {
        "command": command,
        "config": config,
        "version": __version__,
        "conventions": CONVENTIONS,
        "results": results,
        "warnings": list(warnings or []),
    }
    if wallclock is not None:
        report["wallclock_seconds"] = round(wallclock, 3)
    return report


def parallel_map(fn, items, workers: int | None = None):
    """Ordered map over pure tasks; a process pool when workers > 1.

    Results are returned in input order regardless of scheduling, so callers
    stay deterministic.
    """
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with multiprocessing.Pool(processes=min(workers, len(items))) as pool:
        return pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers)))
