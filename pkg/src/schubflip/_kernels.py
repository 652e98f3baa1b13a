"""
Compiled inner loops for orbit enumeration on bit-vector state spaces.

Every action in this package is generated by maps of one shape: flip the bits
of ``mask`` when bits ``p1`` and ``p2`` of the state differ, otherwise do
nothing.  A generator set is three parallel arrays ``(masks, p1, p2)``.
"""

import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numpy as np  # noqa: E402
from numba import njit  # noqa: E402


@njit(cache=True, nogil=True)
def _grow(buf, used):
    new = np.empty(buf.shape[0] * 2, dtype=buf.dtype)
    new[:used] = buf[:used]
    return new


@njit(cache=True, nogil=True)
def bfs_scan(d, masks, p1, p2):
    """Orbits by breadth-first search, seeds taken in increasing order.

    Returns ``(seeds, sizes)``; each seed is the least state of its orbit.
    Memory is one bit per state plus the queue of the largest orbit.
    """
    total = np.int64(1) << d
    visited = np.zeros((total + 7) >> 3, dtype=np.uint8)
    ngen = masks.shape[0]
    queue = np.empty(1024, dtype=np.int64)
    seeds = np.empty(64, dtype=np.int64)
    sizes = np.empty(64, dtype=np.int64)
    norb = 0
    for seed in range(total):
        if visited[seed >> 3] & (1 << (seed & 7)):
            continue
        visited[seed >> 3] |= 1 << (seed & 7)
        queue[0] = seed
        head = 0
        tail = 1
        count = 1
        while head < tail:
            s = queue[head]
            head += 1
            for g in range(ngen):
                if ((s >> p1[g]) ^ (s >> p2[g])) & 1:
                    t = s ^ masks[g]
                    if not visited[t >> 3] & (1 << (t & 7)):
                        visited[t >> 3] |= 1 << (t & 7)
                        if tail == queue.shape[0]:
                            if head > 0:
                                queue[:tail - head] = queue[head:tail]
                                tail -= head
                                head = 0
                            if tail == queue.shape[0]:
                                queue = _grow(queue, tail)
                        queue[tail] = t
                        tail += 1
                        count += 1
        if norb == seeds.shape[0]:
            seeds = _grow(seeds, norb)
            sizes = _grow(sizes, norb)
        seeds[norb] = seed
        sizes[norb] = count
        norb += 1
    return seeds[:norb], sizes[:norb]


@njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


@njit(cache=True, nogil=True)
def union_find(d, masks, p1, p2):
    """Orbit representative (least state) of every state, via union-find."""
    total = np.int64(1) << d
    parent = np.arange(total)
    ngen = masks.shape[0]
    for s in range(total):
        for g in range(ngen):
            if ((s >> p1[g]) ^ (s >> p2[g])) & 1:
                t = s ^ masks[g]
                if t > s:
                    _union(parent, s, t)
    for s in range(total):
        parent[s] = _find(parent, s)
    return parent


@njit(cache=True, nogil=True)
def hook_chunk(lab, out, lo, hi, masks, p1, p2):
    """``out[s] = min(lab[s], lab[g(s)])`` over generators, for lo <= s < hi."""
    changed = False
    ngen = masks.shape[0]
    for s in range(lo, hi):
        best = lab[s]
        for g in range(ngen):
            if ((s >> p1[g]) ^ (s >> p2[g])) & 1:
                x = lab[s ^ masks[g]]
                if x < best:
                    best = x
        if best != lab[s]:
            changed = True
        out[s] = best
    return changed


@njit(cache=True, nogil=True)
def jump_chunk(lab, out, lo, hi):
    changed = False
    for s in range(lo, hi):
        x = lab[lab[s]]
        if x != lab[s]:
            changed = True
        out[s] = x
    return changed


@njit(cache=True, nogil=True)
def covering_union(nclass, m, eu, ev, ia, ib, ic):
    """Components of the covering graph over (class, sign mask) pairs.

    Edge ``k`` joins classes ``eu[k]``, ``ev[k]`` and rewrites the signs at
    bit positions ``ia[k]`` (pair ab), ``ib[k]`` (pair ac), ``ic[k]`` (pair
    bc).  Equal outer signs force the image (kept if the middle agrees,
    otherwise all three flipped); unequal outer signs allow both.
    """
    fiber = np.int64(1) << m
    total = nclass * fiber
    parent = np.arange(total)
    for k in range(eu.shape[0]):
        base_u = eu[k] * fiber
        base_v = ev[k] * fiber
        flip = (np.int64(1) << ia[k]) | (np.int64(1) << ib[k]) | (np.int64(1) << ic[k])
        for s in range(fiber):
            x = (s >> ia[k]) & 1
            y = (s >> ib[k]) & 1
            z = (s >> ic[k]) & 1
            if x == z:
                if y == x:
                    _union(parent, base_u + s, base_v + s)
                else:
                    _union(parent, base_u + s, base_v + (s ^ flip))
            else:
                _union(parent, base_u + s, base_v + s)
                _union(parent, base_u + s, base_v + (s ^ flip))
    count = 0
    for s in range(total):
        if _find(parent, s) == s:
            count += 1
    return count
