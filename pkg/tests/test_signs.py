from itertools import product

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from oracles import brute_reduced_words, orbit_graph_components, track_crossings
from schubflip.signs import (
    canonical_image, canonical_lift, core_bits, covering_components, eight_cycles, four_cycles,
    gamma_components, gamma_generators, lift_edge, pair_bits, transition, twin_lift,
    verify_4_cycles, verify_8_cycles, verify_cycle_basis, verify_flip_transport,
)
from schubflip.wiring import affine_arrangement, diagram_of, v0_word
from schubflip.words import apply_move, build_move_graph, longest_element

# sign changes at three consecutive letters j, j+-1, j under a 3-move, by position
FORCED = {"+++": {"+++"}, "---": {"---"}, "+-+": {"-+-"}, "-+-": {"+-+"}}
BRANCHING = {"++-": {"+--", "-++"}, "--+": {"+--", "-++"},
             "+--": {"++-", "--+"}, "-++": {"++-", "--+"}}
POSITIONAL = {**FORCED, **BRANCHING}


def s(text):
    return tuple(text)


def test_transition_examples():
    out = transition(s("+++"))
    assert out.kind == "deterministic" and out.results == (s("+++"),)
    out = transition(s("++-"))
    assert out.kind == "branching"
    assert set(out.results) == {s("+--"), s("-++")}
    assert out.canonical == s("-++")
    assert transition(s("-+-")).results == (s("+-+"),)


def test_transition_accepts_numeric_signs():
    assert transition((1, 1, -1)).canonical == s("-++")


@pytest.mark.parametrize("triple", ["".join(t) for t in product("+-", repeat=3)])
def test_transition_table_entries(triple):
    out = transition(s(triple))
    assert {"".join(r) for r in out.results} == POSITIONAL[triple]
    assert out.canonical[1] == triple[1] or out.kind == "deterministic"


def test_transition_is_symmetric_relation():
    for x, y in product(POSITIONAL, repeat=2):
        forward = s(y) in transition(s(x)).results
        backward = s(x) in transition(s(y)).results
        assert forward == backward


def test_transition_rejects_junk():
    with pytest.raises(ValueError):
        transition(("+", "0", "+"))


def _mask(pairs_signs, n):
    bits = pair_bits(n)
    return sum(1 << bits[p] for p, sign in pairs_signs.items() if sign == "+")


def test_lift_rank3_examples():
    g = build_move_graph(3)
    u = g.index[(1, 2, 1)]
    core = (1, 2, 3)
    labels = track_crossings((1, 2, 1), 3)
    plus = _mask(dict(zip(labels, "+++")), 3)
    assert lift_edge(g, u, plus, core) == {(1 - u, plus)}
    assert twin_lift(g, u, plus, core) is None
    mixed = _mask(dict(zip(labels, "++-")), 3)
    assert len(lift_edge(g, u, mixed, core)) == 2
    v, image = canonical_lift(g, u, mixed, core)
    # read the image along the word of the other class
    after = track_crossings((2, 1, 2), 3)
    bits = pair_bits(3)
    assert "".join("+" if image >> bits[p] & 1 else "-" for p in after) == "-++"


def test_lifts_agree_with_positional_tables_rank4():
    g = build_move_graph(4)
    bits = pair_bits(4)
    for e in g.edges:
        word = e.word
        moved = apply_move(word, e.pos, "three")
        before = track_crossings(word, 4)
        after = track_crossings(moved, 4)
        for mask in range(64):
            read = "".join("+" if mask >> bits[p] & 1 else "-" for p in before)
            got = {"".join("+" if m >> bits[p] & 1 else "-" for p in after)
                   for _, m in lift_edge(g, e.u, mask, e.core)}
            want = {read[:e.pos] + r + read[e.pos + 3:] for r in POSITIONAL[read[e.pos:e.pos + 3]]}
            assert got == want


def test_canonical_round_trip_rank4():
    g = build_move_graph(4)
    for e in g.edges:
        for mask in range(64):
            v, m = canonical_lift(g, e.u, mask, e.core)
            assert canonical_lift(g, v, m, e.core) == (e.u, mask)


def test_canonical_image_vectorised():
    masks = np.arange(64, dtype=np.int64)
    g = build_move_graph(4)
    for e in g.edges:
        want = [canonical_lift(g, e.u, int(m), e.core)[1] for m in masks]
        assert canonical_image(masks, *core_bits(4, e.core)).tolist() == want


def _positional_covering_components(n):
    """Components over (reduced word, sign per letter) with both move types."""
    words = list(brute_reduced_words(n))
    index = {w: i for i, w in enumerate(words)}
    m = len(words[0])
    states = np.arange(1 << m, dtype=np.int64)
    signs = [(states >> (m - 1 - t)) & 1 for t in range(m)]  # letter t is bit m-1-t
    rows, cols = [], []
    for w in words:
        base = index[w] << m
        for p in range(m - 1):
            if abs(w[p] - w[p + 1]) >= 2:
                other = index[apply_move(w, p, "two")] << m
                swapped = states ^ ((signs[p] ^ signs[p + 1]) * ((1 << (m - 1 - p)) | (1 << (m - 2 - p))))
                rows.append(base + states)
                cols.append(other + swapped)
        for p in range(m - 2):
            if w[p] == w[p + 2] and abs(w[p] - w[p + 1]) == 1:
                other = index[apply_move(w, p, "three")] << m
                triple = (signs[p] << 2) | (signs[p + 1] << 1) | signs[p + 2]
                shift = m - 3 - p
                for src in range(8):
                    text = "".join("+" if src >> (2 - k) & 1 else "-" for k in range(3))
                    for dst in POSITIONAL[text]:
                        code = sum(1 << (2 - k) for k in range(3) if dst[k] == "+")
                        sel = states[triple == src]
                        rows.append(base + sel)
                        cols.append(other + ((sel & ~(7 << shift)) | (code << shift)))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    size = len(words) << m
    graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(size, size))
    return connected_components(graph, directed=False)[0]


@pytest.mark.parametrize("n,expected", [(3, 6), (4, 20), (5, 52)])
def test_covering_components(n, expected):
    assert covering_components(n) == expected


@pytest.mark.parametrize("n", [3, 4, 5])
def test_covering_components_against_positional_oracle(n):
    assert covering_components(n) == _positional_covering_components(n)


def _flip_oracle(word, n):
    """Components of the face-flip graph, built directly from node labels."""
    gens, d = gamma_generators(diagram_of(word, n))
    steps = [lambda x, g=g: x ^ g[0] if (x >> g[1] ^ x >> g[2]) & 1 else x for g in gens]
    return orbit_graph_components(d, steps)


def test_gamma_rank3():
    sizes = _flip_oracle(v0_word(3), 3)
    assert sizes == [1, 1, 1, 1, 2, 2]
    assert gamma_components(v0_word(3)) == 6


@pytest.mark.parametrize("n,expected", [(4, 20), (5, 52)])
def test_gamma_v0(n, expected):
    assert gamma_components(v0_word(n)) == expected


def test_gamma_rank4_against_graph_oracle():
    for w in build_move_graph(4).classes:
        assert gamma_components(w) == len(_flip_oracle(w, 4))


def test_gamma_constant_over_rank5_classes():
    counts = {gamma_components(w) for w in build_move_graph(5).classes}
    assert counts == {52}


def test_gamma_accepts_arrangements():
    assert gamma_components(affine_arrangement(longest_element(4))) == 20
    assert gamma_components(diagram_of(v0_word(4), 4)) == 20


@pytest.mark.parametrize("n", [3, 4])
def test_flip_transport_has_no_violations(n):
    r = verify_flip_transport(n)
    assert r["violations"] == []
    assert r["cases_checked"] == sum(r["outcome_counts"].values())
    assert r["distant_direct"] == r["distant_cases"]


def test_flip_transport_rank3_counts():
    r = verify_flip_transport(3)
    assert r["cases_checked"] == 8 and r["outcome_counts"]["direct"] == 8


def test_short_cycles_rank4():
    g = build_move_graph(4)
    assert four_cycles(g) == []
    (cyc,) = eight_cycles(g)
    assert cyc.vertices[0] == cyc.vertices[-1]
    assert len(set(cyc.vertices)) == 8 == len(g.classes)


def test_cycle_lifts_rank4():
    four = verify_4_cycles(4)
    eight = verify_8_cycles(4)
    assert four["violations"] == [] and four["cycles"] == 0
    assert eight["violations"] == []
    assert eight["open_lifts"] > 0 and eight["open_witness"] is not None


def test_cycle_basis():
    r3 = verify_cycle_basis(3)
    assert r3["cycle_space_dimension"] == 0 and r3["spans"]
    r4 = verify_cycle_basis(4)
    assert r4["cycle_space_dimension"] == 1 and r4["spans"]


def test_cycle_basis_rank5():
    r = verify_cycle_basis(5)
    assert (r["vertices"], r["edges"]) == (62, 100)
    assert r["cycle_space_dimension"] == 39 == r["rank"]
    assert r["spans"]
