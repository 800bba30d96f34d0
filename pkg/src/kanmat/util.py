"""Seeding, worker-pool, and float helpers used across modules."""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_KEY_SEP = "\x1f"


def stable_seed(*parts) -> int:
    """Derive a 64-bit seed from arbitrary key parts.

    Uses SHA-256 over the reprs of the parts, so the value is stable across
    processes and platforms (unlike ``hash()``). Keys should be built from
    ints and strings only.
    """
    payload = _KEY_SEP.join(repr(p) for p in parts)
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def stable_rng(*parts) -> np.random.Generator:
    return np.random.default_rng(stable_seed(*parts))


def split_indices(n: int, holdout_fraction: float, rng: np.random.Generator):
    """Seeded uniform shuffle split into (train, test) index arrays."""
    n_test = int(round(holdout_fraction * n))
    n_test = min(max(n_test, 1), n - 1)
    perm = rng.permutation(n)
    return perm[n_test:], perm[:n_test]


def clip01(value: float) -> float:
    return float(min(max(value, 0.0), 1.0))


def worker_count() -> int:
    """Worker cap from KANMAT_THREADS (0 or unset = auto)."""
    raw = os.environ.get("KANMAT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)


def parallel_map(fn, items):
    """Map over independent jobs, preserving input order.

    Jobs must be pure functions of their arguments; results are therefore
    identical whether executed sequentially or on the thread pool.
    """
    items = list(items)
    workers = min(worker_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def canonical_float(value: float) -> float:
    """Round to 9 significant digits so serialized documents are byte-stable."""
    return float(f"{value:.9g}")
