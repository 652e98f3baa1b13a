"""
Permutations and reduced words in the symmetric group S_n.

Letters are 1-based: letter ``i`` stands for the adjacent transposition
``s_i = (i, i+1)``.  Permutations are tuples in one-line notation over
``1..n``; words are tuples of letters.  The product of a word is taken left to
right, each letter swapping two adjacent *positions* of the one-line notation.

>>> canonical_form((3, 1, 2))
(1, 3, 2)
>>> g = build_move_graph(4)
>>> len(g.classes), len(g.edges)
(8, 8)
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

__all__ = [
    "MAX_RANK", "MoveError", "ResourceError",
    "longest_element", "permutation_length", "word_product", "is_reduced",
    "reduced_words", "apply_move", "canonical_form", "rank_of",
    "three_move_sites", "bring_adjacent", "Edge", "MoveGraph",
    "build_move_graph",
]

# G^7 already has 24698 classes; beyond that the class count explodes
MAX_RANK = 7


class MoveError(ValueError):
    """A 2- or 3-move was requested at a site where its pattern is absent."""


class ResourceError(RuntimeError):
    """A computation would exceed the configured size bound."""


def longest_element(n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError("rank must be at least 1")
    return tuple(range(n, 0, -1))


def permutation_length(perm: Sequence[int]) -> int:
    """Number of inversions."""
    n = len(perm)
    return sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])


def _check_letters(word: Sequence[int], n: int) -> None:
    for letter in word:
        if not 1 <= letter <= n - 1:
            raise ValueError(f"letter {letter} out of range for n={n}")


def word_product(word: Sequence[int], n: int) -> tuple[int, ...]:
    _check_letters(word, n)
    perm = list(range(1, n + 1))
    for i in word:
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return tuple(perm)


def is_reduced(word: Sequence[int], n: int) -> bool:
    """True iff the length of the product equals the number of letters."""
    _check_letters(word, n)
    perm = list(range(1, n + 1))
    for i in word:
        # right multiplication by s_i adds an inversion iff perm(i) < perm(i+1)
        if perm[i - 1] > perm[i]:
            return False
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return True


def reduced_words(perm: Sequence[int]) -> list[tuple[int, ...]]:
    """All reduced words of ``perm``, by peeling right descents.

    Exponential; meant for small ranks and as a test oracle.
    """
    n = len(perm)
    out: list[tuple[int, ...]] = []

    def peel(p: list[int], suffix: tuple[int, ...]) -> None:
        descents = [i for i in range(1, n) if p[i - 1] > p[i]]
        if not descents:
            out.append(suffix)
            return
        for i in descents:
            p[i - 1], p[i] = p[i], p[i - 1]
            peel(p, (i,) + suffix)
            p[i - 1], p[i] = p[i], p[i - 1]

    peel(list(perm), ())
    return sorted(out)


def apply_move(word: Sequence[int], pos: int, kind: str) -> tuple[int, ...]:
    """Apply a 2-move (``"two"``) or 3-move (``"three"``) starting at ``pos``."""
    w = tuple(word)
    if kind in ("two", "two_move"):
        if pos < 0 or pos + 1 >= len(w) or abs(w[pos] - w[pos + 1]) < 2:
            raise MoveError(f"no commuting pair at position {pos} of {w}")
        return w[:pos] + (w[pos + 1], w[pos]) + w[pos + 2:]
    if kind in ("three", "three_move"):
        if pos < 0 or pos + 2 >= len(w):
            raise MoveError(f"no braid triple at position {pos} of {w}")
        a, b, c = w[pos:pos + 3]
        if a != c or abs(a - b) != 1:
            raise MoveError(f"no braid triple at position {pos} of {w}")
        return w[:pos] + (b, a, b) + w[pos + 3:]
    raise ValueError(f"unknown move kind {kind!r}")


def _foata(word: Sequence[int]) -> tuple[int, ...]:
    # block index of a letter = 1 + deepest earlier letter it does not commute with
    last: dict[int, int] = {}
    keyed = []
    for letter in word:
        level = 1 + max(last.get(letter - 1, 0), last.get(letter, 0), last.get(letter + 1, 0))
        last[letter] = level
        keyed.append((level, letter))
    keyed.sort()
    return tuple(letter for _, letter in keyed)


def canonical_form(word: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    """Cartier-Foata normal form modulo 2-moves.

    Each block holds the letters that can be commuted to the front of what
    remains; blocks are emitted in order, letters ascending within a block.
    """
    if n is None:
        n = max(word, default=0) + 1
    if not is_reduced(word, n):
        raise ValueError(f"{tuple(word)} is not reduced")
    return _foata(word)


def rank_of(word: Sequence[int]) -> int:
    """Sum of the letters; constant on commutation classes."""
    return sum(word)


def three_move_sites(word: Sequence[int]) -> list[tuple[int, int, int]]:
    """Position triples ``(p, q, r)`` that a 3-move can act on, up to 2-moves.

    ``p < r`` are consecutive occurrences of a letter ``j`` with exactly one
    occurrence of one neighbour letter ``j +- 1`` between them (at ``q``) and
    none of the other.  These are exactly the triangular faces of the wiring
    diagram.
    """
    sites = []
    prev: dict[int, int] = {}
    for r, j in enumerate(word):
        p = prev.get(j)
        prev[j] = r
        if p is None:
            continue
        ups = [q for q in range(p + 1, r) if word[q] == j + 1]
        downs = [q for q in range(p + 1, r) if word[q] == j - 1]
        if len(ups) + len(downs) == 1:
            sites.append((p, (ups or downs)[0], r))
    return sites


def bring_adjacent(word: Sequence[int], p: int, q: int, r: int) -> tuple[tuple[int, ...], int]:
    """Commute letters so that positions ``p, q, r`` become consecutive.

    Letters strictly between ``p`` and ``r`` that lie above ``p`` in the heap
    order move after the triple, the others move before it.  Returns the new
    word and the position of the triple in it.
    """
    above = {p}
    before, after = [], []
    for t in range(p + 1, r):
        if t == q:
            above.add(t)
            continue
        if any(abs(word[t] - word[s]) <= 1 for s in above):
            above.add(t)
            after.append(word[t])
        else:
            before.append(word[t])
    new = (tuple(word[:p]) + tuple(before) + (word[p], word[q], word[r])
           + tuple(after) + tuple(word[r + 1:]))
    return new, p + len(before)


def _crossing_wires(word: Sequence[int], n: int, positions: Sequence[int]) -> list[tuple[int, int]]:
    tracks = list(range(1, n + 1))
    wanted = set(positions)
    found = {}
    for t, i in enumerate(word):
        a, b = tracks[i - 1], tracks[i]
        if t in wanted:
            found[t] = (min(a, b), max(a, b))
        tracks[i - 1], tracks[i] = b, a
    return [found[t] for t in positions]


class Edge(NamedTuple):
    """A 3-move between two commutation classes.

    ``core`` is the triple of wires ``a < b < c`` whose crossings the move
    rewrites; ``word`` is a member of class ``u`` in which the move applies
    at ``pos``, with letters ``letters``.
    """
    u: int
    v: int
    core: tuple[int, int, int]
    word: tuple[int, ...]
    pos: int
    letters: tuple[int, int, int]


@dataclass
class MoveGraph:
    """Commutation classes of reduced words of w0 joined by 3-moves."""
    n: int
    classes: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int]
    edges: list[Edge]
    # per class: core wires -> edge id
    adjacency: list[dict[tuple[int, int, int], int]] = field(repr=False)

    def neighbor(self, u: int, core: tuple[int, int, int]) -> int:
        e = self.edges[self.adjacency[u][core]]
        return e.v if e.u == u else e.u

    def edge_at(self, u: int, core: tuple[int, int, int]) -> Edge:
        return self.edges[self.adjacency[u][core]]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])


def _start_word(n: int) -> tuple[int, ...]:
    return tuple(i for top in range(n - 1, 0, -1) for i in range(1, top + 1))


def build_move_graph(n: int, *, max_rank: int = MAX_RANK) -> MoveGraph:
    """Breadth-first construction of G^n over commutation classes."""
    if n < 2:
        raise ValueError("rank must be at least 2")
    if n > max_rank:
        raise ResourceError(f"n={n} exceeds the rank bound {max_rank}; raise max_rank to force it")
    start = _foata(_start_word(n))
    classes = [start]
    index = {start: 0}
    adjacency: list[dict] = [{}]
    edges: list[Edge] = []
    queue = deque([0])
    while queue:
        u = queue.popleft()
        word = classes[u]
        for p, q, r in three_move_sites(word):
            core_pairs = _crossing_wires(word, n, (p, q, r))
            core = tuple(sorted({w for pair in core_pairs for w in pair}))
            if core in adjacency[u]:
                continue
            moved, pos = bring_adjacent(word, p, q, r)
            target = _foata(apply_move(moved, pos, "three"))
            v = index.get(target)
            if v is None:
                v = len(classes)
                classes.append(target)
                index[target] = v
                adjacency.append({})
                queue.append(v)
            eid = len(edges)
            edges.append(Edge(u, v, core, moved, pos, moved[pos:pos + 3]))
            adjacency[u][core] = eid
            adjacency[v][core] = eid
    return MoveGraph(n, classes, index, edges, adjacency)
