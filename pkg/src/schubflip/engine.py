"""
Orbit enumeration for actions generated by conditional bit flips.

A generator is ``(mask, p1, p2)``: it XORs ``mask`` into the state when bits
``p1`` and ``p2`` differ.  Such a map is an involution whenever both ``p1``
and ``p2`` lie in ``mask`` (the condition is then preserved by the flip),
which holds for every action built in this package.

Engines:

``bfs``
    breadth-first search with a visited bitmap and a linear seed scan;
    ``2**d / 8`` bytes plus the largest orbit's queue.  Works up to d = 32.
``uf``
    union-find over all states; ``8 * 2**d`` bytes.  Cross-check engine.

With ``threads > 1`` the state space is split into contiguous chunks and
orbits are found by min-label propagation with pointer jumping, each sweep
running its chunks on a thread pool.  The result does not depend on the
schedule: every state ends labelled by the least state of its orbit.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .words import ResourceError

__all__ = ["ENGINES", "MAX_DIM", "HARD_MAX_DIM", "OrbitReport", "generator_arrays",
           "enumerate_orbits", "orbit_labels", "estimate_bytes", "run_orbits"]

ENGINES = ("bfs", "uf")
MAX_DIM = 28
HARD_MAX_DIM = 32


@dataclass
class OrbitReport:
    k: int
    orbit_count: int
    histogram: dict[int, int]
    elapsed: float
    states_visited: int
    engine: str = "bfs"
    threads: int = 1
    representatives: list[int] | None = field(default=None, repr=False)

    def summary(self) -> tuple:
        """Everything except timing; equal for equal inputs on any engine."""
        return (self.k, self.orbit_count, tuple(sorted(self.histogram.items())),
                self.states_visited)

    def to_dict(self, timings: bool = False) -> dict:
        doc = {
            "k": self.k,
            "orbit_count": self.orbit_count,
            "histogram": [{"length": length, "count": count}
                          for length, count in sorted(self.histogram.items())],
            "states_visited": self.states_visited,
            "engine": self.engine,
            "threads": self.threads,
            "elapsed_ms": round(self.elapsed * 1000, 3) if timings else None,
        }
        if self.representatives is not None:
            doc["representatives"] = list(self.representatives)
        return doc


def generator_arrays(gens: Sequence[tuple[int, int, int]]):
    masks = np.array([g[0] for g in gens], dtype=np.int64)
    p1 = np.array([g[1] for g in gens], dtype=np.int64)
    p2 = np.array([g[2] for g in gens], dtype=np.int64)
    return masks, p1, p2


def estimate_bytes(d: int, engine: str, threads: int = 1) -> int:
    if threads > 1:
        return 2 * 8 * (1 << d)
    if engine == "uf":
        return 8 * (1 << d)
    return (1 << d) // 8 + 1


def _check(d: int, engine: str, threads: int, max_dim: int, memory_cap: int | None) -> None:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
    if d > min(max_dim, HARD_MAX_DIM):
        raise ResourceError(f"state space 2^{d} exceeds the bound 2^{min(max_dim, HARD_MAX_DIM)}")
    need = estimate_bytes(d, engine, threads)
    if memory_cap is not None and need > memory_cap:
        raise ResourceError(f"engine {engine!r} with {threads} thread(s) needs ~{need} bytes "
                            f"for 2^{d} states, over the cap of {memory_cap}")


def _parallel_labels(d: int, masks, p1, p2, threads: int) -> np.ndarray:
    total = 1 << d
    bounds = np.linspace(0, total, threads + 1).astype(np.int64)
    chunks = list(zip(bounds[:-1], bounds[1:]))
    lab = np.arange(total, dtype=np.int64)
    out = np.empty_like(lab)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        while True:
            hooked = any(list(pool.map(
                lambda c: _kernels.hook_chunk(lab, out, c[0], c[1], masks, p1, p2), chunks)))
            lab, out = out, lab
            while any(list(pool.map(lambda c: _kernels.jump_chunk(lab, out, c[0], c[1]), chunks))):
                lab, out = out, lab
            if not hooked:
                return lab


def orbit_labels(d: int, gens, threads: int = 1) -> np.ndarray:
    """Least state of the orbit of every state, as an array of length 2**d."""
    if len(gens) == 0:
        return np.arange(1 << d, dtype=np.int64)
    masks, p1, p2 = generator_arrays(gens)
    if threads > 1:
        return _parallel_labels(d, masks, p1, p2, threads)
    return _kernels.union_find(d, masks, p1, p2)


def enumerate_orbits(d: int, gens, engine: str = "bfs", threads: int = 1):
    """Return ``(seeds, sizes)``: least state and length of every orbit, seeds ascending."""
    masks, p1, p2 = generator_arrays(gens)
    if len(gens) == 0:
        seeds = np.arange(1 << d, dtype=np.int64)
        return seeds, np.ones_like(seeds)
    if threads > 1:
        lab = _parallel_labels(d, masks, p1, p2, threads)
    elif engine == "uf":
        lab = _kernels.union_find(d, masks, p1, p2)
    else:
        return _kernels.bfs_scan(d, masks, p1, p2)
    counts = np.bincount(lab, minlength=1 << d)
    seeds = np.flatnonzero(counts)
    return seeds.astype(np.int64), counts[seeds].astype(np.int64)


def run_orbits(k: int, d: int, gens, *, engine: str = "bfs", threads: int = 1,
               max_dim: int = MAX_DIM, memory_cap: int | None = None,
               representatives: bool = False) -> OrbitReport:
    _check(d, engine, threads, max_dim, memory_cap)
    start = time.perf_counter()
    seeds, sizes = enumerate_orbits(d, gens, engine, threads)
    elapsed = time.perf_counter() - start
    hist = Counter(int(s) for s in sizes)
    name = engine if threads == 1 else "label"
    return OrbitReport(k, len(seeds), dict(sorted(hist.items())), elapsed, int(sizes.sum()),
                       name, threads, [int(s) for s in seeds] if representatives else None)
