import random

import numpy as np
import pytest

from oracles import orbit_graph_components
from schubflip.engine import OrbitReport
from schubflip.fliporbits import (
    apply_generator, bit_index, check_group_properties, check_orbit_structure,
    conjectured_histogram, count_orbits, decode, encode, find_invariant_form, general_action,
    general_orbits, generators, induced_action, induced_generator, main_conjecture_value,
    node_to_entry, positions, project, v0_generators_via_encoding,
)
from schubflip import gf2
from schubflip.words import ResourceError, longest_element


def to_matrix(state, k):
    m = np.zeros((k + 2, k + 2), dtype=np.int64)  # 1-based with a zero border
    for (i, j), v in decode(state, k).items():
        m[i, j] = v
    return m


def from_matrix(m, k):
    return encode({(i, j): int(m[i, j]) % 2 for i, j in positions(k)}, k)


def matrix_flip(m, i, j):
    """Add the block trace to the 2x2 block at rows i, i+1 and columns j, j+1."""
    out = m.copy()
    trace = (m[i, j] + m[i + 1, j + 1]) % 2
    for r in (i, i + 1):
        for c in (j, j + 1):
            if r <= c:
                out[r, c] = (out[r, c] + trace) % 2
    return out


def test_encoding_round_trip():
    for k in range(1, 5):
        d = k * (k + 1) // 2
        for s in random.Random(k).sample(range(1 << d), min(50, 1 << d)):
            assert encode(decode(s, k), k) == s
    assert bit_index(3)[(1, 1)] == 0 and bit_index(3)[(3, 3)] == 5


def test_generator_examples():
    k = 3
    g = next(g for g in generators(k) if (g.i, g.j) == (1, 2))
    block = [(1, 2), (1, 3), (2, 2), (2, 3)]
    s = encode(dict(zip(block, (1, 0, 0, 0))), k)
    assert [decode(apply_generator(s, g), k)[p] for p in block] == [0, 1, 1, 1]
    s = encode(dict(zip(block, (1, 1, 0, 1))), k)
    assert apply_generator(s, g) == s


@pytest.mark.parametrize("k", [2, 3, 4])
def test_generators_match_matrix_arithmetic(k):
    d = k * (k + 1) // 2
    for s in range(1 << d):
        m = to_matrix(s, k)
        for g in generators(k):
            assert apply_generator(s, g) == from_matrix(matrix_flip(m, g.i, g.j), k)


def test_generators_are_involutions():
    for k in range(2, 6):
        d = k * (k + 1) // 2
        rng = random.Random(k)
        for g in generators(k):
            for s in (rng.randrange(1 << d) for _ in range(40)):
                assert apply_generator(apply_generator(s, g), g) == s


@pytest.mark.parametrize("k,expected", [(2, 6), (3, 20), (4, 52)])
def test_count_orbits_small(k, expected):
    assert count_orbits(k).orbit_count == expected


@pytest.mark.parametrize("k", [2, 3, 4])
def test_count_orbits_against_graph_oracle(k):
    d = k * (k + 1) // 2
    steps = [lambda s, i=g.i, j=g.j: from_matrix(matrix_flip(to_matrix(s, k), i, j), k)
             for g in generators(k)]
    sizes = orbit_graph_components(d, steps)
    report = count_orbits(k)
    hist = {}
    for size in sizes:
        hist[size] = hist.get(size, 0) + 1
    assert report.histogram == hist
    assert report.states_visited == 1 << d


def test_k2_has_six_orbits_over_eight_states():
    r = count_orbits(2)
    assert r.states_visited == 8 and r.orbit_count == 6


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_engines_agree(k):
    ref = count_orbits(k, "bfs", representatives=True)
    for engine, threads in (("uf", 1), ("bfs", 2), ("uf", 3)):
        other = count_orbits(k, engine, threads, representatives=True)
        assert other.summary() == ref.summary()
        assert other.representatives == ref.representatives


def test_representatives_are_orbit_minima():
    r = count_orbits(3, representatives=True)
    seen = set()
    for seed in r.representatives:
        orbit = {seed}
        frontier = [seed]
        while frontier:
            s = frontier.pop()
            for g in generators(3):
                t = apply_generator(s, g)
                if t not in orbit:
                    orbit.add(t)
                    frontier.append(t)
        assert min(orbit) == seed
        assert not orbit & seen
        seen |= orbit
    assert len(seen) == 64


def test_report_json_has_no_timing_by_default():
    doc = count_orbits(3).to_dict()
    assert doc["elapsed_ms"] is None
    assert count_orbits(3).to_dict() == doc
    assert count_orbits(3).to_dict(timings=True)["elapsed_ms"] is not None


def test_resource_limits():
    with pytest.raises(ResourceError):
        count_orbits(8)
    with pytest.raises(ResourceError):
        count_orbits(6, "uf", memory_cap=1 << 20)
    with pytest.raises(ValueError):
        count_orbits(3, "dfs")


def test_main_conjecture_values():
    assert main_conjecture_value(6) == 96
    assert main_conjecture_value(7) == 192


@pytest.mark.parametrize("n", range(5, 12))
def test_conjectured_histogram_partitions_the_space(n):
    h = conjectured_histogram(n)
    assert sum(length * count for length, count in h.items()) == 2 ** (n * (n + 1) // 2)
    assert sum(h.values()) == main_conjecture_value(n + 1)


def test_conjectured_histogram_instances():
    assert conjectured_histogram(5) == {1: 32, 480: 8, 512: 48, 540: 8}
    assert conjectured_histogram(6) == {1: 64, 16128: 8, 16380: 16, 16384: 96, 16640: 8}


def test_orbit_structure_k5():
    r = check_orbit_structure(5)
    assert r["predicted_total_states"] == 2 ** 15
    assert r["computed_orbits"] == 96
    assert r["match"]
    assert {b["status"] for b in r["buckets"]} == {"MATCH"}


def test_orbit_structure_reports_mismatch():
    fake = OrbitReport(5, 2, {1: 32, 7: 1}, 0.0, 39)
    r = check_orbit_structure(5, report=fake)
    assert not r["match"]
    assert {b["length"]: b["status"] for b in r["buckets"]}[7] == "MISMATCH"


@pytest.mark.parametrize("k", [3, 4, 5])
def test_group_properties(k):
    r = check_group_properties(k)
    assert r["violations"] == []
    assert r["involutions"] and r["same_cycle_type"]
    assert all(t["is_s4"] for t in r["triples"])


def test_group_properties_counts_k4():
    r = check_group_properties(4)
    assert r["braid_pairs_checked"] + r["commuting_pairs_checked"] == 15
    assert len(r["triples"]) > 0


def neighbours(i, j, k):
    out = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1), (i - 1, j - 1), (i + 1, j + 1)]
    return [p for p in out if 1 <= p[0] <= p[1] <= k]


@pytest.mark.parametrize("k", [3, 4, 5])
def test_projection_intertwines_with_neighbour_rule(k):
    rng = random.Random(k)
    d = k * (k + 1) // 2
    for _ in range(200):
        s = rng.randrange(1 << d)
        m = to_matrix(s, k)
        for g in generators(k):
            image = decode(project(from_matrix(matrix_flip(m, g.i, g.j), k), k), k - 1)
            quotient = decode(project(s, k), k - 1)
            x = quotient[(g.i, g.j)]
            for p in neighbours(g.i, g.j, k - 1):
                quotient[p] ^= x
            assert image == quotient


@pytest.mark.parametrize("k", [3, 4])
def test_induced_action_exhaustive(k):
    r = induced_action(k)
    assert r["mode"] == "exhaustive"
    assert r["kernel_invariant"] and r["neighbour_rule"] and r["violations"] == []


def test_induced_action_basis_mode():
    r = induced_action(6)
    assert r["mode"] == "basis" and r["neighbour_rule"]


def _is_invariant(rows, maps, d):
    b = np.array([[(rows[r] >> c) & 1 for c in range(d)] for r in range(d)])
    for cols in maps:
        g = np.array([[(cols[c] >> r) & 1 for c in range(d)] for r in range(d)])
        if not np.array_equal((g.T @ b @ g) % 2, b):
            return False
    return True


@pytest.mark.parametrize("n", [4, 5, 6])
def test_invariant_forms_are_invariant(n):
    r = find_invariant_form(n)
    d = r["dimension"]
    maps = [induced_generator(i, j, n) for i, j in positions(n - 1)]
    for name, ms in (("induced", maps), ("contragredient", [gf2.transpose(m, d) for m in maps])):
        rows = r["variants"][name]["form_rows"]
        if rows is not None:
            assert _is_invariant(rows, ms, d)
            assert all((rows[i] >> i) & 1 == 0 for i in range(d))


def test_invariant_form_rank5_contragredient_corank():
    r = find_invariant_form(5)
    assert r["expected_corank"] == 2
    assert r["variants"]["contragredient"]["min_corank"] == 2


def test_invariant_form_bounds():
    with pytest.raises(ResourceError):
        find_invariant_form(8)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_general_orbits_longest_element(n):
    assert general_orbits(longest_element(n)).orbit_count == count_orbits(n - 1).orbit_count


def test_general_orbits_trivial_cases():
    r = general_orbits((1, 2, 3, 4))
    assert r.orbit_count == 1 and r.states_visited == 1
    r = general_orbits((2, 1, 4, 3))
    assert r.orbit_count == 4 and r.histogram == {1: 4}


def test_general_orbits_against_graph_oracle():
    rng = random.Random(3)
    for _ in range(12):
        w = list(range(1, 6))
        rng.shuffle(w)
        act = general_action(w)
        d = len(act.arrangement.points)
        steps = [lambda f, r=r: act.apply(r, f) for r in range(len(act.generators))]
        sizes = orbit_graph_components(d, steps)
        assert general_orbits(w).orbit_count == len(sizes)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_v0_faces_become_matrix_generators(n):
    flips = {g.as_flip() for g in generators(n - 1)}
    via = v0_generators_via_encoding(n)
    assert {(m, min(a, b), max(a, b)) for m, a, b in via} == \
        {(m, min(a, b), max(a, b)) for m, a, b in flips}


def test_node_to_entry_levels():
    enc = node_to_entry(4)
    assert sorted(enc.values()) == positions(3)
    assert enc[(1, 2)] == (1, 1)
