import os
from concurrent.futures import ThreadPoolExecutor


def n_threads() -> int:
    """Worker count from MBS_LAB_THREADS (0 or unset = one per CPU)."""
    raw = os.environ.get("MBS_LAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def ordered_map(fn, items):
    """Map ``fn`` over ``items`` in parallel, returning results in input order."""
    items = list(items)
    workers = min(n_threads(), max(len(items), 1))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
