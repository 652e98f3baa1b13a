"""
Sign vectors over crossings and the graphs built from them.

A sign vector for rank ``n`` is an int with one bit per wire pair, ordered as
``all_pairs(n)``; ``+`` is 1 and ``-`` is 0.  Because crossings are named by
wire pairs, a 2-move leaves the sign vector untouched and a 3-move with core
wires ``a < b < c`` touches exactly the bits of ``ab``, ``ac`` and ``bc``.

In word order a 3-move reads its three crossings as ``(ab, ac, bc)`` on one
side and ``(bc, ac, ab)`` on the other.  The positional sign tables commute
with reversing both triples, so in pair order the move acts the same way in
both directions:

* outer signs equal: forced; kept if the middle sign agrees, else all three
  flip;
* outer signs differ: either keep all three (the canonical lift, which keeps
  the middle sign) or flip all three (its twin).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _kernels, gf2
from .engine import generator_arrays, orbit_labels, run_orbits
from .wiring import (AffineArrangement, Region, WiringDiagram, all_pairs, diagram_of,
                     elementary_regions, region_correspondence, v0_word)
from .words import MoveGraph, ResourceError, build_move_graph

__all__ = [
    "TransitionOutcome", "transition", "pair_bits", "core_bits", "lift_edge",
    "canonical_lift", "twin_lift", "canonical_image", "covering_components",
    "gamma_generators", "gamma_components", "gamma_labels",
    "verify_flip_transport", "four_cycles", "eight_cycles", "verify_4_cycles",
    "verify_8_cycles", "verify_cycle_basis",
]

Triple = tuple[str, str, str]

_TABLE_FORCED = {
    ("+", "+", "+"): ("+", "+", "+"),
    ("-", "-", "-"): ("-", "-", "-"),
    ("+", "-", "+"): ("-", "+", "-"),
    ("-", "+", "-"): ("+", "-", "+"),
}
_TABLE_BRANCHING = {
    ("+", "+", "-"): (("+", "-", "-"), ("-", "+", "+")),
    ("-", "-", "+"): (("+", "-", "-"), ("-", "+", "+")),
    ("+", "-", "-"): (("+", "+", "-"), ("-", "-", "+")),
    ("-", "+", "+"): (("+", "+", "-"), ("-", "-", "+")),
}


@dataclass(frozen=True)
class TransitionOutcome:
    kind: str  # "deterministic" or "branching"
    results: tuple[Triple, ...]
    canonical: Triple


def _norm(sign) -> str:
    if sign in ("+", 1, True):
        return "+"
    if sign in ("-", -1, 0, False):
        return "-"
    raise ValueError(f"not a sign: {sign!r}")


def transition(triple: Sequence) -> TransitionOutcome:
    """Sign change of three consecutive parameters under a 3-move, in word order."""
    t = tuple(_norm(s) for s in triple)
    if len(t) != 3:
        raise ValueError("a 3-move acts on exactly three signs")
    if t in _TABLE_FORCED:
        r = _TABLE_FORCED[t]
        return TransitionOutcome("deterministic", (r,), r)
    results = _TABLE_BRANCHING[t]
    canonical = next(r for r in results if r[1] == t[1])
    return TransitionOutcome("branching", results, canonical)


@lru_cache(maxsize=None)
def pair_bits(n: int) -> dict[tuple[int, int], int]:
    return {p: b for b, p in enumerate(all_pairs(n))}


def core_bits(n: int, core: tuple[int, int, int]) -> tuple[int, int, int]:
    a, b, c = core
    bits = pair_bits(n)
    return bits[(a, b)], bits[(a, c)], bits[(b, c)]


def _step(mask: int, ia: int, ib: int, ic: int) -> tuple[int, int | None]:
    """(canonical image, twin image or None)."""
    flip = (1 << ia) | (1 << ib) | (1 << ic)
    x, y, z = (mask >> ia) & 1, (mask >> ib) & 1, (mask >> ic) & 1
    if x == z:
        return (mask if y == x else mask ^ flip), None
    return mask, mask ^ flip


def _other(graph: MoveGraph, u: int, core) -> int:
    if core not in graph.adjacency[u]:
        raise ValueError(f"class {u} has no edge with core {core}")
    return graph.neighbor(u, core)


def lift_edge(graph: MoveGraph, u: int, mask: int, core) -> set[tuple[int, int]]:
    """Neighbours of ``(u, mask)`` in the covering graph across the edge ``core``."""
    v = _other(graph, u, core)
    canon, twin = _step(mask, *core_bits(graph.n, core))
    return {(v, canon)} if twin is None else {(v, canon), (v, twin)}


def canonical_lift(graph: MoveGraph, u: int, mask: int, core) -> tuple[int, int]:
    v = _other(graph, u, core)
    return v, _step(mask, *core_bits(graph.n, core))[0]


def twin_lift(graph: MoveGraph, u: int, mask: int, core):
    """The twin of the canonical lift at ``(u, mask)``, as ``((u, m1), (v, m2))``,
    or None when the sign change is forced."""
    v = _other(graph, u, core)
    ia, ib, ic = core_bits(graph.n, core)
    if _step(mask, ia, ib, ic)[1] is None:
        return None
    flip = (1 << ia) | (1 << ib) | (1 << ic)
    return (u, mask ^ flip), (v, _step(mask ^ flip, ia, ib, ic)[0])


def canonical_image(masks: np.ndarray, ia: int, ib: int, ic: int) -> np.ndarray:
    """Vectorised canonical lift on an array of sign vectors."""
    x = (masks >> ia) & 1
    y = (masks >> ib) & 1
    z = (masks >> ic) & 1
    flip = (1 << ia) | (1 << ib) | (1 << ic)
    return np.where((x == z) & (y != x), masks ^ flip, masks)


def covering_components(n: int, *, max_rank: int = 5, graph: MoveGraph | None = None) -> int:
    """Connected components of the covering graph over G^n (all class/sign pairs)."""
    if n > max_rank:
        raise ResourceError(f"covering graph for n={n} has {n}(n-1)/2-bit fibers over every class; "
                            f"raise max_rank (n=6 needs ~240 MB)")
    g = graph or build_move_graph(n)
    m = n * (n - 1) // 2
    if not g.edges:
        return len(g.classes) * (1 << m)
    bits = np.array([core_bits(n, e.core) for e in g.edges], dtype=np.int64)
    eu = np.array([e.u for e in g.edges], dtype=np.int64)
    ev = np.array([e.v for e in g.edges], dtype=np.int64)
    return int(_kernels.covering_union(len(g.classes), m, eu, ev,
                                       bits[:, 0].copy(), bits[:, 1].copy(), bits[:, 2].copy()))


def _regions_and_bits(u) -> tuple[list[Region], dict, int]:
    if isinstance(u, AffineArrangement):
        bit_of = {p: b for b, p in enumerate(u.points)}
        return list(u.regions), bit_of, len(u.points)
    if isinstance(u, WiringDiagram):
        d = u
    else:
        word = tuple(u)
        n = max(word, default=0) + 1
        d = diagram_of(word, n)
    if len(d.word) != d.n * (d.n - 1) // 2:
        bit_of = {c.wires: t for t, c in enumerate(d.crossings)}
        return elementary_regions(d), bit_of, len(d.word)
    return elementary_regions(d), pair_bits(d.n), len(d.word)


def gamma_generators(u) -> tuple[list[tuple[int, int, int]], int]:
    """Face flips of ``u`` as ``(mask, p1, p2)`` triples, and the number of bits."""
    regions, bit_of, d = _regions_and_bits(u)
    gens = []
    for r in regions:
        gens.append((sum(1 << bit_of[p] for p in r.nodes),
                     bit_of[r.horizontal[0]], bit_of[r.horizontal[1]]))
    return gens, d


def gamma_components(u, engine: str = "bfs", threads: int = 1, max_dim: int = 28) -> int:
    """Components of the fiber graph on the sign vectors of ``u``.

    ``u`` is a word of the longest element, its wiring diagram, or an affine
    arrangement.  A face flip is an edge when the two horizontal corners of
    the face carry opposite signs.
    """
    gens, d = gamma_generators(u)
    return run_orbits(d, d, gens, engine=engine, threads=threads, max_dim=max_dim).orbit_count


def gamma_labels(u) -> np.ndarray:
    gens, d = gamma_generators(u)
    return orbit_labels(d, gens)


# ---------------------------------------------------------------------------
# transport of face flips across a 3-move

def _adm(mask: int, x: int, a: int, b: int) -> bool:
    return bool(((x >> a) ^ (x >> b)) & 1)


def verify_flip_transport(n: int, graph: MoveGraph | None = None) -> dict:
    """For every directed edge u -> v, sign vector and admissible face B of u,
    compare c(I_B(x)) with flips of c(x) by the image of B and the core.

    Exactly one of three outcomes is expected: the flip of B is transported
    directly; or it is transported and followed by the core flip; or it is
    preceded by the core flip.
    """
    if n > 5:
        raise ResourceError("transport check is limited to n <= 5")
    g = graph or build_move_graph(n)
    m = n * (n - 1) // 2
    bits = pair_bits(n)
    regions = [elementary_regions(diagram_of(w, n)) for w in g.classes]
    gens = [[(sum(1 << bits[p] for p in r.nodes), bits[r.horizontal[0]], bits[r.horizontal[1]])
             for r in rs] for rs in regions]
    counts = {"direct": 0, "then_core": 0, "core_first": 0}
    cases = distant = distant_direct = both_orders = 0
    violations = []
    for e in g.edges:
        for u, v in ((e.u, e.v), (e.v, e.u)):
            ia, ib, ic = core_bits(n, e.core)
            corr = region_correspondence(regions[u], regions[v], e.core)
            a_idx = next(i for i, r in enumerate(regions[u])
                         if r.nodes == frozenset([(e.core[0], e.core[1]), (e.core[0], e.core[2]),
                                                  (e.core[1], e.core[2])]))
            ma, a1, a2 = gens[v][corr[a_idx]]
            core_nodes = regions[u][a_idx].nodes
            for bi, region in enumerate(regions[u]):
                mb, b1, b2 = gens[u][bi]
                mcb, cb1, cb2 = gens[v][corr[bi]]
                is_distant = not (region.nodes & core_nodes)
                for x in range(1 << m):
                    if not _adm(x, x, b1, b2):
                        continue
                    cases += 1
                    cx = _step(x, ia, ib, ic)[0]
                    target = _step(x ^ mb, ia, ib, ic)[0]
                    p1 = _adm(cx, cx, cb1, cb2) and target == cx ^ mcb
                    p2 = (_adm(cx, cx, cb1, cb2) and _adm(cx ^ mcb, cx ^ mcb, a1, a2)
                          and target == cx ^ mcb ^ ma)
                    p3 = (_adm(cx, cx, a1, a2) and _adm(cx ^ ma, cx ^ ma, cb1, cb2)
                          and target == cx ^ ma ^ mcb)
                    held = [name for name, ok in zip(counts, (p1, p2, p3)) if ok]
                    # outcomes are tried in order; the second and third give the
                    # same vector (flips commute) and differ only in which order
                    # of the two flips is admissible
                    if held:
                        counts[held[0]] += 1
                    both_orders += p2 and p3
                    if is_distant:
                        distant += 1
                        distant_direct += p1
                    if not held or (p1 and (p2 or p3)):
                        violations.append({"u": u, "v": v, "core": list(e.core), "signs": x,
                                           "region": sorted(map(list, region.nodes)),
                                           "held": held})
    return {"check": "flip-transport", "n": n, "cases_checked": cases,
            "outcome_counts": counts, "both_orders_admissible": both_orders,
            "distant_cases": distant,
            "distant_direct": distant_direct, "violations": violations}


# ---------------------------------------------------------------------------
# short cycles of G^n and their canonical lifts

def _core_pairs(core) -> frozenset:
    a, b, c = core
    return frozenset([(a, b), (a, c), (b, c)])


def _walk(g: MoveGraph, u: int, cores) -> list[int] | None:
    path = [u]
    for core in cores:
        if core not in g.adjacency[path[-1]]:
            return None
        path.append(g.neighbor(path[-1], core))
    return path


@dataclass(frozen=True)
class Cycle:
    vertices: tuple[int, ...]  # closed: vertices[0] == vertices[-1]
    cores: tuple[tuple[int, int, int], ...]

    def rotations(self):
        """The cycle read from each base vertex, in both directions."""
        k = len(self.cores)
        verts = self.vertices[:-1]
        for s in range(k):
            cores = self.cores[s:] + self.cores[:s]
            vs = verts[s:] + verts[:s]
            yield Cycle(vs + (vs[0],), cores)
            rc = tuple(reversed(cores))
            rv = tuple(reversed(vs + (vs[0],)))
            yield Cycle(rv, rc)


def _edge_key(g: MoveGraph, cyc: Cycle) -> frozenset:
    return frozenset(g.adjacency[u][c] for u, c in zip(cyc.vertices, cyc.cores))


def four_cycles(g: MoveGraph) -> list[Cycle]:
    """Squares from two 3-moves on disjoint crossing triples, applied in either order."""
    seen = {}
    for u in range(len(g.classes)):
        for c1, c2 in combinations(sorted(g.adjacency[u]), 2):
            if _core_pairs(c1) & _core_pairs(c2):
                continue
            path = _walk(g, u, (c1, c2, c1, c2))
            if path is None or path[-1] != u:
                raise AssertionError(f"disjoint moves {c1}, {c2} at class {u} do not commute")
            cyc = Cycle(tuple(path), (c1, c2, c1, c2))
            seen.setdefault(_edge_key(g, cyc), cyc)
    return list(seen.values())


def eight_cycles(g: MoveGraph) -> list[Cycle]:
    """Simple closed walks of length 8 whose cores all lie inside one set of four wires."""
    seen = {}
    for u in range(len(g.classes)):
        for wires in combinations(range(1, g.n + 1), 4):
            ws = set(wires)

            def extend(path, cores):
                x = path[-1]
                if len(cores) == 8:
                    if x == u:
                        cyc = Cycle(tuple(path), tuple(cores))
                        seen.setdefault(_edge_key(g, cyc), cyc)
                    return
                for core in g.adjacency[x]:
                    if not ws.issuperset(core) or (cores and core == cores[-1]):
                        continue
                    y = g.neighbor(x, core)
                    if y in path[1:] or (y == u and len(cores) < 7):
                        continue
                    extend(path + [y], cores + [core])

            extend([u], [])
    return list(seen.values())


def _lift_all(g: MoveGraph, cyc: Cycle) -> np.ndarray:
    m = g.n * (g.n - 1) // 2
    x = np.arange(1 << m, dtype=np.int64)
    for core in cyc.cores:
        x = canonical_image(x, *core_bits(g.n, core))
    return x


def verify_4_cycles(n: int, graph: MoveGraph | None = None) -> dict:
    if n > 5:
        raise ResourceError("cycle checks are limited to n <= 5")
    g = graph or build_move_graph(n)
    m = n * (n - 1) // 2
    start = np.arange(1 << m, dtype=np.int64)
    cycles = four_cycles(g)
    cases = 0
    violations = []
    for cyc in cycles:
        for rot in cyc.rotations():
            end = _lift_all(g, rot)
            cases += len(end)
            bad = np.flatnonzero(end != start)
            for x in bad[:5]:
                violations.append({"base": rot.vertices[0], "cores": [list(c) for c in rot.cores],
                                   "signs": int(x), "end": int(end[x])})
    return {"check": "four-cycle-lifts", "n": n, "cycles": len(cycles),
            "cases_checked": cases, "violations": violations}


def verify_8_cycles(n: int, graph: MoveGraph | None = None) -> dict:
    if n > 5:
        raise ResourceError("cycle checks are limited to n <= 5")
    g = graph or build_move_graph(n)
    m = n * (n - 1) // 2
    start = np.arange(1 << m, dtype=np.int64)
    labels = {}
    cycles = eight_cycles(g)
    cases = not_closed = 0
    witness = None
    violations = []
    for cyc in cycles:
        for rot in cyc.rotations():
            u = rot.vertices[0]
            if u not in labels:
                labels[u] = gamma_labels(diagram_of(g.classes[u], n))
            end = _lift_all(g, rot)
            cases += len(end)
            open_ = np.flatnonzero(end != start)
            not_closed += len(open_)
            if witness is None and len(open_):
                x = int(open_[0])
                witness = {"base": u, "word": list(g.classes[u]),
                           "cores": [list(c) for c in rot.cores], "signs": x, "end": int(end[x])}
            bad = np.flatnonzero(labels[u][start] != labels[u][end])
            for x in bad[:5]:
                violations.append({"base": u, "cores": [list(c) for c in rot.cores],
                                   "signs": int(x), "end": int(end[x])})
    return {"check": "eight-cycle-lifts", "n": n, "cycles": len(cycles), "cases_checked": cases,
            "open_lifts": not_closed, "open_witness": witness, "violations": violations}


def verify_cycle_basis(n: int, graph: MoveGraph | None = None) -> dict:
    """Do the 4- and 8-cycles span the F_2 cycle space of G^n?"""
    if n > 5:
        raise ResourceError("cycle checks are limited to n <= 5")
    g = graph or build_move_graph(n)
    vectors = []
    for cyc in four_cycles(g) + eight_cycles(g):
        vec = 0
        for eid in _edge_key(g, cyc):
            vec |= 1 << eid
        vectors.append(vec)
    # a vector is a cycle iff every vertex meets an even number of its edges
    boundary_ok = True
    for vec in vectors:
        deg = [0] * len(g.classes)
        for eid, e in enumerate(g.edges):
            if (vec >> eid) & 1:
                deg[e.u] ^= 1
                deg[e.v] ^= 1
        boundary_ok &= not any(deg)
    dim = len(g.edges) - len(g.classes) + 1
    r = gf2.rank(vectors)
    return {"check": "cycle-space", "n": n, "vertices": len(g.classes), "edges": len(g.edges),
            "cycle_space_dimension": dim, "generators": len(vectors), "rank": r,
            "all_closed": boundary_ok, "spans": r == dim and boundary_ok,
            "violations": [] if r == dim and boundary_ok else [f"rank {r} < dimension {dim}"]}
