"""
Wiring diagrams (pseudoline arrangements) of reduced words.

Wire ``a`` starts on track ``a``.  Letter ``i`` at step ``t`` swaps the wires
on tracks ``i`` and ``i+1``; the crossing is labelled by the unordered wire
pair and sits on level ``i``.  Since a reduced word crosses each pair at most
once, a wire pair names a crossing independently of the word chosen inside a
commutation class, and every piece of per-crossing state in this package is
keyed by wire pairs.

Bounded faces are read off level by level: two consecutive crossings on
level ``i`` enclose a face in the strip between tracks ``i`` and ``i+1``,
whose other corners are the crossings on levels ``i-1`` and ``i+1`` in
between.  The two level-``i`` crossings are its horizontal nodes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Sequence

from .words import MoveGraph, is_reduced, permutation_length

__all__ = [
    "Pair", "Crossing", "WiringDiagram", "Region", "AffineArrangement",
    "diagram_of", "v0_word", "elementary_regions", "region_correspondence",
    "e_core", "affine_arrangement", "insertion_word", "all_pairs",
    "diagram_json",
]

Pair = tuple[int, int]


class Crossing(NamedTuple):
    position: int
    wires: Pair
    level: int


@dataclass(frozen=True)
class WiringDiagram:
    word: tuple[int, ...]
    n: int
    crossings: tuple[Crossing, ...]

    def labels(self) -> dict[Pair, Crossing]:
        return {c.wires: c for c in self.crossings}


@dataclass(frozen=True)
class Region:
    """A bounded face: its corner crossings and the two on its own level."""
    nodes: frozenset
    horizontal: tuple[Pair, Pair]
    height: int

    @property
    def size(self) -> int:
        return len(self.nodes)


def all_pairs(n: int) -> list[Pair]:
    return list(combinations(range(1, n + 1), 2))


def diagram_of(word: Sequence[int], n: int) -> WiringDiagram:
    word = tuple(word)
    if not is_reduced(word, n):
        raise ValueError(f"{word} is not reduced: some pair of wires would cross twice")
    tracks = list(range(1, n + 1))
    crossings = []
    for t, i in enumerate(word):
        a, b = tracks[i - 1], tracks[i]
        crossings.append(Crossing(t, (min(a, b), max(a, b)), i))
        tracks[i - 1], tracks[i] = b, a
    return WiringDiagram(word, n, tuple(crossings))


def v0_word(n: int) -> tuple[int, ...]:
    """The word s_1 s_2 ... s_{n-1} s_1 ... s_{n-2} ... s_1 s_2 s_1."""
    if n < 2:
        raise ValueError("rank must be at least 2")
    return tuple(i for top in range(n - 1, 0, -1) for i in range(1, top + 1))


def elementary_regions(d: WiringDiagram) -> list[Region]:
    by_level: dict[int, list[Crossing]] = {}
    for c in d.crossings:
        by_level.setdefault(c.level, []).append(c)
    regions = []
    for level in sorted(by_level):
        row = by_level[level]
        for left, right in zip(row, row[1:]):
            inner = [c.wires for c in d.crossings[left.position + 1:right.position]
                     if abs(c.level - level) == 1]
            nodes = frozenset([left.wires, right.wires, *inner])
            regions.append(Region(nodes, (left.wires, right.wires), level))
    return regions


def region_correspondence(regions_u: Sequence[Region], regions_v: Sequence[Region],
                          core: tuple[int, int, int]) -> list[int]:
    """Match the faces of two arrangements that differ by one triangle flip.

    Returns ``m`` with ``regions_v[m[i]]`` corresponding to ``regions_u[i]``.
    A face meeting the core triangle in one or two corners trades those
    corners for the remaining ones; the core maps to itself and every other
    face keeps its corners.
    """
    a, b, c = core
    core_nodes = frozenset([(a, b), (a, c), (b, c)])
    lookup = {r.nodes: k for k, r in enumerate(regions_v)}
    out = []
    for r in regions_u:
        if r.nodes == core_nodes or not (r.nodes & core_nodes):
            image = r.nodes
        else:
            image = r.nodes ^ core_nodes
        if image not in lookup:
            raise ValueError(f"no face with corners {sorted(image)} after flipping {core}")
        out.append(lookup[image])
    return out


def e_core(graph: MoveGraph, u: int, core: tuple[int, int, int]) -> tuple[Region, list[int]]:
    """The triangle of class ``u`` rewritten by the edge with ``core`` wires,
    and the face correspondence from ``u`` to the other endpoint."""
    if core not in graph.adjacency[u]:
        raise ValueError(f"class {u} has no edge with core {core}")
    v = graph.neighbor(u, core)
    regions_u = elementary_regions(diagram_of(graph.classes[u], graph.n))
    regions_v = elementary_regions(diagram_of(graph.classes[v], graph.n))
    a, b, c = core
    core_nodes = frozenset([(a, b), (a, c), (b, c)])
    triangle = next(r for r in regions_u if r.nodes == core_nodes)
    return triangle, region_correspondence(regions_u, regions_v, core)


def insertion_word(w: Sequence[int]) -> tuple[int, ...]:
    """A reduced word taking wire ``a`` from track ``a`` to track ``w[a-1]``.

    Insertion-sort network: the first wire that can still move down keeps
    moving down until it is blocked.  For the longest element this is
    ``v0_word``.
    """
    n = len(w)
    if sorted(w) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(w)} is not a permutation of 1..{n}")
    dest = list(w)  # destination track of the wire currently on each track
    word: list[int] = []
    while True:
        t = next((t for t in range(n - 1) if dest[t] > dest[t + 1]), None)
        if t is None:
            break
        while t < n - 1 and dest[t] > dest[t + 1]:
            dest[t], dest[t + 1] = dest[t + 1], dest[t]
            word.append(t + 1)
            t += 1
    return tuple(word)


@dataclass(frozen=True)
class AffineArrangement:
    w: tuple[int, ...]
    diagram: WiringDiagram
    points: tuple[Pair, ...]
    regions: tuple[Region, ...]


def affine_arrangement(w: Sequence[int]) -> AffineArrangement:
    """Arrangement in which wires ``a < b`` cross iff ``w(a) > w(b)``."""
    w = tuple(w)
    word = insertion_word(w)
    d = diagram_of(word, len(w))
    assert len(word) == permutation_length(w)
    return AffineArrangement(w, d, tuple(c.wires for c in d.crossings),
                             tuple(elementary_regions(d)))


def diagram_json(d: WiringDiagram, regions: Sequence[Region] | None = None) -> str:
    if regions is None:
        regions = elementary_regions(d)
    doc = {
        "n": d.n,
        "word": list(d.word),
        "crossings": [{"position": c.position, "wires": list(c.wires), "level": c.level}
                      for c in d.crossings],
        "regions": [{"nodes": sorted(list(p) for p in r.nodes),
                     "horizontal": [list(p) for p in r.horizontal],
                     "height": r.height} for r in regions],
    }
    return json.dumps(doc, indent=2)
