"""
The flip group acting on upper triangular F_2 matrices.

A state of size ``k`` is an int holding the entries ``(i, j)``,
``1 <= i <= j <= k``, in row-major triangular order (entry ``(1, 1)`` is bit
0).  Generator ``g_ij`` (``1 <= i <= j <= k-1``) adds the trace of the 2x2
block on rows ``i, i+1`` and columns ``j, j+1`` (its upper triangle when
``i == j``) to every entry of that block.  Over F_2 this flips the block when
the two diagonal entries of the block differ.

>>> s = encode({(1, 1): 1}, 2)
>>> g = generators(2)[0]
>>> decode(apply_generator(s, g), 2)
{(1, 1): 0, (1, 2): 1, (2, 2): 1}
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from . import gf2
from .engine import MAX_DIM, OrbitReport, run_orbits
from .wiring import AffineArrangement, Region, affine_arrangement, diagram_of, elementary_regions, v0_word
from .words import ResourceError

__all__ = [
    "positions", "bit_index", "encode", "decode", "Generator", "generators",
    "apply_generator", "count_orbits", "main_conjecture_value",
    "conjectured_histogram", "check_orbit_structure", "hex_adjacent",
    "check_group_properties", "project", "induced_generator",
    "induced_action", "find_invariant_form", "GeneralAction",
    "general_action", "general_orbits", "region_generators", "node_to_entry",
    "v0_generators_via_encoding",
]


def positions(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, k + 1) for j in range(i, k + 1)]


def bit_index(k: int) -> dict[tuple[int, int], int]:
    return {p: b for b, p in enumerate(positions(k))}


def encode(entries: dict[tuple[int, int], int], k: int) -> int:
    idx = bit_index(k)
    s = 0
    for p, v in entries.items():
        if v & 1:
            s |= 1 << idx[p]
    return s


def decode(state: int, k: int) -> dict[tuple[int, int], int]:
    return {p: (state >> b) & 1 for b, p in enumerate(positions(k))}


@dataclass(frozen=True)
class Generator:
    i: int
    j: int
    touched: tuple[int, ...]
    trace_pair: tuple[int, int]

    @property
    def mask(self) -> int:
        return sum(1 << b for b in self.touched)

    def as_flip(self) -> tuple[int, int, int]:
        return self.mask, self.trace_pair[0], self.trace_pair[1]


def generators(k: int) -> list[Generator]:
    idx = bit_index(k)
    out = []
    for i, j in positions(k - 1):
        block = [(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)]
        touched = tuple(sorted(idx[p] for p in block if p[0] <= p[1]))
        out.append(Generator(i, j, touched, (idx[(i, j)], idx[(i + 1, j + 1)])))
    return out


def apply_generator(state: int, g: Generator) -> int:
    a, b = g.trace_pair
    if ((state >> a) ^ (state >> b)) & 1:
        return state ^ g.mask
    return state


def count_orbits(k: int, engine: str = "bfs", threads: int = 1, *, max_dim: int = MAX_DIM,
                 memory_cap: int | None = None, representatives: bool = False) -> OrbitReport:
    """Orbits of the flip group on upper triangular k x k matrices over F_2."""
    if k < 1:
        raise ValueError("k must be positive")
    d = k * (k + 1) // 2
    gens = [g.as_flip() for g in generators(k)]
    return run_orbits(k, d, gens, engine=engine, threads=threads, max_dim=max_dim,
                      memory_cap=memory_cap, representatives=representatives)


def main_conjecture_value(n: int) -> int:
    return 3 * 2 ** (n - 1)


def conjectured_histogram(n: int) -> dict[int, int]:
    """Predicted ``{orbit length: number of orbits}`` on N^n(F_2), n >= 5."""
    if n < 5:
        raise ValueError("the prediction covers n >= 5 only")
    if n % 2 == 0:
        k = n // 2
        rows = [
            (1, 2 ** (2 * k)),
            (2 ** ((2 * k + 1) * (k - 1)), 2 ** (k + 2) * (2 ** (k - 1) - 1)),
            (2 ** ((k + 1) * (k - 1)) * (2 ** (k * (k - 1)) - 1), 2 ** k),
            (2 ** ((k + 1) * (k - 1)) * (2 ** (k * (k - 1)) + 1), 2 ** k),
            (2 ** (k - 1) * (2 ** (2 * k * (k - 1)) - 1), 2 ** (k + 1)),
        ]
    else:
        k = (n - 1) // 2
        rows = [
            (1, 2 ** (2 * k + 1)),
            (2 ** ((2 * k - 1) * (k + 1)), 2 ** (k + 2) * (2 ** k - 1)),
            (2 ** (k * k + k - 1) * (2 ** (k * k) - 1), 2 ** (k + 1)),
            (2 ** k * (2 ** (k * k) - 1) * (2 ** (k * k - 1) + 1), 2 ** (k + 1)),
        ]
    hist: dict[int, int] = {}
    for length, count in rows:
        hist[length] = hist.get(length, 0) + count
    return dict(sorted(hist.items()))


def check_orbit_structure(n: int, report: OrbitReport | None = None, **kw) -> dict:
    """Compare the computed orbit histogram on N^n(F_2) with the prediction."""
    predicted = conjectured_histogram(n)
    if report is None:
        report = count_orbits(n, **kw)
    lengths = sorted(set(predicted) | set(report.histogram))
    buckets = []
    for length in lengths:
        want = predicted.get(length, 0)
        got = report.histogram.get(length, 0)
        buckets.append({"length": length, "predicted": want, "computed": got,
                        "status": "MATCH" if want == got else "MISMATCH"})
    return {
        "n": n,
        "predicted_total_states": sum(a * b for a, b in predicted.items()),
        "predicted_orbits": sum(predicted.values()),
        "computed_orbits": report.orbit_count,
        "buckets": buckets,
        "match": all(b["status"] == "MATCH" for b in buckets),
    }


# ---------------------------------------------------------------------------
# group-theoretic checks on the linear maps

def _linear(g: Generator, d: int) -> tuple[int, ...]:
    cols = []
    for b in range(d):
        cols.append((1 << b) ^ (g.mask if b in g.trace_pair else 0))
    return tuple(cols)


def hex_adjacent(a: tuple[int, int], b: tuple[int, int]) -> bool:
    di, dj = b[0] - a[0], b[1] - a[1]
    return (di, dj) in {(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)}


def _closure(gens: Sequence[tuple[int, ...]], d: int, limit: int = 100_000) -> set:
    one = gf2.identity(d)
    seen = {one}
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = gf2.compose(g, x)
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise ResourceError("group closure exceeded its size limit")
                queue.append(y)
    return seen


def _order(x: tuple[int, ...], d: int) -> int:
    one = gf2.identity(d)
    y, r = x, 1
    while y != one:
        y = gf2.compose(x, y)
        r += 1
    return r


# element orders of S_4: identity, 9 involutions, 8 three-cycles, 6 four-cycles
_S4_ORDERS = {1: 1, 2: 9, 3: 8, 4: 6}


def check_group_properties(k: int) -> dict:
    """Commutation, braid and S_4 relations among the generators for size ``k``."""
    if k > 7:
        raise ResourceError("group checks are limited to k <= 7")
    d = k * (k + 1) // 2
    gens = generators(k)
    maps = {(g.i, g.j): _linear(g, d) for g in gens}
    one = gf2.identity(d)
    violations = []
    involutions = all(gf2.compose(m, m) == one for m in maps.values())
    if not involutions:
        violations.append("some generator is not an involution")
    commuting = braid = 0
    for a, b in combinations(sorted(maps), 2):
        ab = gf2.compose(maps[a], maps[b])
        if hex_adjacent(a, b):
            braid += 1
            if gf2.compose(ab, gf2.compose(ab, ab)) != one:
                violations.append(f"(g{a} g{b})^3 != 1")
        else:
            commuting += 1
            if ab != gf2.compose(maps[b], maps[a]):
                violations.append(f"g{a}, g{b} do not commute")
    triples = []
    for a, b, c in combinations(sorted(maps), 3):
        if hex_adjacent(a, b) and hex_adjacent(b, c) and hex_adjacent(a, c):
            group = _closure([maps[a], maps[b], maps[c]], d)
            orders: dict[int, int] = {}
            for x in group:
                r = _order(x, d)
                orders[r] = orders.get(r, 0) + 1
            ok = len(group) == 24 and orders == _S4_ORDERS
            triples.append({"generators": [list(a), list(b), list(c)], "order": len(group),
                            "element_orders": dict(sorted(orders.items())), "is_s4": ok})
            if not ok:
                violations.append(f"<g{a}, g{b}, g{c}> has order {len(group)}")
    # necessary condition for conjugacy: equal number of fixed states
    fixed = {f"{i},{j}": 2 ** (d - gf2.rank(c ^ (1 << b) for b, c in enumerate(m)))
             for (i, j), m in maps.items()}
    same_cycle_type = len(set(fixed.values())) <= 1
    if not same_cycle_type:
        violations.append("generators have different cycle types")
    return {
        "k": k,
        "involutions": involutions,
        "commuting_pairs_checked": commuting,
        "braid_pairs_checked": braid,
        "triples": triples,
        "fixed_states": fixed,
        "same_cycle_type": same_cycle_type,
        "violations": violations,
    }


def project(state: int, k: int) -> int:
    """The map N^k -> N^{k-1}: entry (i, j) becomes (i, j) + (i+1, j+1)."""
    src = bit_index(k)
    out = 0
    for b, (i, j) in enumerate(positions(k - 1)):
        if ((state >> src[(i, j)]) ^ (state >> src[(i + 1, j + 1)])) & 1:
            out |= 1 << b
    return out


def induced_generator(i: int, j: int, k: int) -> tuple[int, ...]:
    """Action of g_ij on N^{k-1}: add entry (i, j) to its hexagonal neighbours."""
    idx = bit_index(k - 1)
    d = len(idx)
    nbrs = sum(1 << idx[p] for p in idx if hex_adjacent((i, j), p))
    src = idx[(i, j)]
    return tuple((1 << b) ^ (nbrs if b == src else 0) for b in range(d))


def induced_action(k: int, exhaustive_limit: int = 16) -> dict:
    """Check that ker(project) is invariant and the quotient action is the neighbour rule."""
    if k < 2:
        raise ValueError("k must be at least 2")
    d = k * (k + 1) // 2
    gens = generators(k)
    induced = {(g.i, g.j): induced_generator(g.i, g.j, k) for g in gens}
    if d <= exhaustive_limit:
        states = range(1 << d)
        mode = "exhaustive"
    else:
        # all maps involved are linear, so the unit vectors decide
        states = [1 << b for b in range(d)]
        mode = "basis"
    kernel_ok = equivariant_ok = True
    violations = []
    checked = 0
    for s in states:
        ps = project(s, k)
        for g in gens:
            t = apply_generator(s, g)
            checked += 1
            pt = project(t, k)
            if ps == 0 and pt != 0:
                kernel_ok = False
                violations.append(f"g{g.i}{g.j} moves kernel state {s} out of the kernel")
            if pt != gf2.apply(induced[(g.i, g.j)], ps):
                equivariant_ok = False
                violations.append(f"project o g{g.i}{g.j} != induced o project at state {s}")
    return {"k": k, "mode": mode, "cases_checked": checked, "kernel_invariant": kernel_ok,
            "neighbour_rule": equivariant_ok, "violations": violations[:20]}


def _form_matrix(sol: int, pairs: list[tuple[int, int]], d: int) -> list[int]:
    rows = [0] * d
    for u, (a, b) in enumerate(pairs):
        if (sol >> u) & 1:
            rows[a] |= 1 << b
            rows[b] |= 1 << a
    return rows


def _invariant_forms(maps: Sequence[tuple[int, ...]], d: int) -> list[int]:
    pairs = list(combinations(range(d), 2))
    rows = []
    for cols in maps:
        for x, y in pairs:
            gx, gy = cols[x], cols[y]
            row = 0
            for u, (a, b) in enumerate(pairs):
                c = (((gx >> a) & (gy >> b)) ^ ((gx >> b) & (gy >> a))) & 1
                if (a, b) == (x, y):
                    c ^= 1
                if c:
                    row |= 1 << u
            rows.append(row)
    return gf2.nullspace(rows, len(pairs))


def find_invariant_form(n: int, enumerate_limit: int = 16) -> dict:
    """Search for alternating forms on N^{n-1}(F_2) fixed by the induced group action.

    Two readings of the action are searched: the induced action itself and its
    contragredient (transpose-inverse, which is the transpose here since every
    generator is an involution).  Reports the solution space dimension and the
    least corank among nonzero solutions, next to ``floor((n-1)/2)``.
    """
    if n < 3 or n > 7:
        raise ResourceError("form search is limited to 3 <= n <= 7")
    d = n * (n - 1) // 2
    pairs = list(combinations(range(d), 2))
    maps = [induced_generator(i, j, n) for i, j in positions(n - 1)]
    variants = {"induced": maps, "contragredient": [gf2.transpose(m, d) for m in maps]}
    out = {"n": n, "dimension": d, "expected_corank": (n - 1) // 2, "variants": {}}
    for name, ms in variants.items():
        basis = _invariant_forms(ms, d)
        coranks = []
        if basis and len(basis) <= enumerate_limit:
            for mask in range(1, 1 << len(basis)):
                sol = 0
                for t, b in enumerate(basis):
                    if (mask >> t) & 1:
                        sol ^= b
                coranks.append(d - gf2.rank(_form_matrix(sol, pairs, d)))
        best = min(coranks) if coranks else None
        example = _form_matrix(basis[0], pairs, d) if len(basis) == 1 else None
        out["variants"][name] = {
            "solution_dimension": len(basis),
            "min_corank": best,
            "coranks": sorted(set(coranks)),
            "form_rows": example,
            "matches_expected": best == (n - 1) // 2,
        }
    return out


# ---------------------------------------------------------------------------
# flips on arbitrary arrangements

def region_generators(regions: Sequence[Region], bit_of: dict) -> list[tuple[int, int, int]]:
    gens = []
    for r in regions:
        mask = sum(1 << bit_of[p] for p in r.nodes)
        gens.append((mask, bit_of[r.horizontal[0]], bit_of[r.horizontal[1]]))
    return gens


@dataclass
class GeneralAction:
    arrangement: AffineArrangement
    bit_of: dict
    generators: list[tuple[int, int, int]]

    def apply(self, region: int, f: int) -> int:
        mask, a, b = self.generators[region]
        return f ^ mask if ((f >> a) ^ (f >> b)) & 1 else f


def general_action(w: Sequence[int]) -> GeneralAction:
    arr = affine_arrangement(w)
    bit_of = {p: b for b, p in enumerate(arr.points)}
    return GeneralAction(arr, bit_of, region_generators(arr.regions, bit_of))


def general_orbits(w: Sequence[int], engine: str = "bfs", threads: int = 1, *,
                   max_dim: int = MAX_DIM, memory_cap: int | None = None) -> OrbitReport:
    act = general_action(w)
    d = len(act.arrangement.points)
    return run_orbits(d, d, act.generators, engine=engine, threads=threads,
                      max_dim=max_dim, memory_cap=memory_cap)


def node_to_entry(n: int) -> dict[tuple[int, int], tuple[int, int]]:
    """Matrix entry of each crossing of the v0 arrangement of rank ``n``.

    The crossing with ordinal ``t`` (from the left) on level ``L`` goes to
    entry ``(t, t + L - 1)``: level 1 is the main diagonal and each level up
    is the next superdiagonal.  Under this map a face's horizontal corners
    land on the diagonal of a 2x2 block, so face flips become generators.
    """
    d = diagram_of(v0_word(n), n)
    seen: dict[int, int] = {}
    out = {}
    for c in d.crossings:
        t = seen.get(c.level, 0) + 1
        seen[c.level] = t
        out[c.wires] = (t, t + c.level - 1)
    return out


def v0_generators_via_encoding(n: int) -> list[tuple[int, int, int]]:
    """Face flips of v0 written in matrix bit positions (size ``n - 1``)."""
    enc = node_to_entry(n)
    idx = bit_index(n - 1)
    bit_of = {p: idx[e] for p, e in enc.items()}
    return region_generators(elementary_regions(diagram_of(v0_word(n), n)), bit_of)
