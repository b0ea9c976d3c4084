import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qcequil import codes, tanner
from qcequil.circulant import ExponentMatrix, MetExponentMatrix
from qcequil.exceptions import ResourceError
import oracles

EQ1 = np.array([[1, 0, 1, 1, 1], [1, 1, 0, 0, 0], [0, 1, 1, 1, 1]], dtype=np.uint8)
SEVEN = ExponentMatrix([[1, 2, 4], [6, 5, 3]], 7)


def repetition(n):
    H = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        H[i, i] = H[i, i + 1] = 1
    return H


def eight_cycle_fixture():
    """Four weight-3 variables on an 8-cycle through four checks, each with a private check."""
    H = np.zeros((8, 4), dtype=np.uint8)
    for v in range(4):
        H[v, v] = H[(v + 1) % 4, v] = 1
        H[4 + v, v] = 1
    return H


def test_build_tanner_counts():
    g = tanner.build_tanner(EQ1)
    assert (g.n_variables, g.n_checks, len(g.edges)) == (5, 3, 10)
    assert g.variable_degrees().tolist() == EQ1.sum(axis=0).tolist()
    assert g.check_degrees().tolist() == EQ1.sum(axis=1).tolist()


def test_build_tanner_identity_and_zero():
    assert len(tanner.build_tanner(np.eye(3, dtype=np.uint8)).edges) == 3
    assert len(tanner.build_tanner(np.zeros((2, 3), dtype=np.uint8)).edges) == 0


def test_girth_bfs_basics():
    assert tanner.girth_bfs(repetition(5)) == tanner.ACYCLIC
    assert tanner.girth_bfs(np.ones((2, 2), dtype=np.uint8)) == 4


def test_cycle_condition_examples():
    assert tanner.cycle_condition_girth(ExponentMatrix([[0, 0], [0, 0]], 1)) == 4
    assert tanner.cycle_condition_girth(ExponentMatrix([[0, 0], [0, 1]], 2)) == 8
    assert oracles.girth_walks([[0, 0], [0, 1]], 2) == 8


def test_seven_girth_three_ways():
    H = codes.lift(SEVEN)
    g = tanner.girth_bfs(H)
    assert g == tanner.cycle_condition_girth(SEVEN) == oracles.girth_bfs_plain(H.tolist()) == 12


def test_cycle_condition_forest_and_cap():
    assert tanner.cycle_condition_girth(ExponentMatrix([[0, 1, 2]], 5)) == tanner.ACYCLIC
    assert tanner.cycle_condition_girth(SEVEN, cap=10) is None


exponents = st.tuples(st.integers(1, 3), st.integers(1, 4), st.integers(1, 8)).flatmap(
    lambda s: st.tuples(
        st.lists(st.lists(st.integers(-1, s[2] - 1), min_size=s[1], max_size=s[1]), min_size=s[0], max_size=s[0]),
        st.just(s[2]),
    )
)


@given(exponents)
def test_cycle_condition_matches_bfs(args):
    rows, L = args
    E = ExponentMatrix(rows, L)
    g_alg = tanner.cycle_condition_girth(E, cap=12)
    g_bfs = tanner.girth_bfs(codes.lift(E), cap=12)
    assert (tanner.ACYCLIC if g_alg is None else g_alg) == g_bfs


@given(exponents)
def test_lifted_girth_even_and_at_least_four(args):
    g = tanner.girth_bfs(codes.lift(ExponentMatrix(*args)))
    assert g == tanner.ACYCLIC or (g >= 4 and g % 2 == 0)


def test_single_variable_trapping_set():
    H = codes.lift(SEVEN)
    sets = tanner.find_trapping_sets(H, 1, 5)
    assert len(sets) == 21 and all((ts.a, ts.b) == (1, 2) for ts in sets)


def test_eight_cycle_gives_ts44():
    sets = tanner.find_trapping_sets(eight_cycle_fixture(), 4, 4)
    full = [ts for ts in sets if ts.a == 4]
    assert len(full) == 1
    assert (full[0].b, full[0].variables) == (4, (0, 1, 2, 3))
    assert full[0].odd_checks == (4, 5, 6, 7)


def test_trapping_sets_recompute_b():
    H = codes.lift(SEVEN)
    for ts in tanner.find_trapping_sets(H, 3, 6):
        assert len(tanner.odd_degree_checks(H, ts.variables)) == ts.b


def test_trapping_sets_connected_only():
    H = np.eye(3, dtype=np.uint8)
    assert [ts.a for ts in tanner.find_trapping_sets(H, 3, 3)] == [1, 1, 1]


def test_trapping_sets_sorted_and_thread_independent():
    H = codes.lift(SEVEN)
    one = tanner.find_trapping_sets(H, 4, 4, n_jobs=1)
    many = tanner.find_trapping_sets(H, 4, 4, n_jobs=4)
    assert one == many
    assert [ts.sort_key() for ts in one] == sorted(ts.sort_key() for ts in one)


def test_trapping_set_budget():
    with pytest.raises(ResourceError) as info:
        tanner.find_trapping_sets(codes.lift(SEVEN), 4, 4, budget=10)
    assert info.value.guard == "budget"


def test_trapping_sets_match_subset_oracle():
    rng = random.Random(5)
    for _ in range(20):
        H = np.array([[rng.random() < 0.4 for _ in range(7)] for _ in range(4)], dtype=np.uint8)
        got = {(ts.variables, ts.b) for ts in tanner.find_trapping_sets(H, 3, 2)}
        want = set()
        for a in range(1, 4):
            for sub in itertools.combinations(range(7), a):
                # connectivity by union-find over shared checks
                parent = {v: v for v in sub}

                def find(v):
                    while parent[v] != v:
                        v = parent[v]
                    return v

                for u, w in itertools.combinations(sub, 2):
                    if any(H[c, u] and H[c, w] for c in range(4)):
                        parent[find(u)] = find(w)
                if len({find(v) for v in sub}) != 1:
                    continue
                b = sum(sum(int(H[c, v]) for v in sub) % 2 for c in range(4))
                if b <= 2:
                    want.add((sub, b))
        assert got == want


def test_min_distance_trivial_and_repetition():
    assert tanner.min_distance_exhaustive(np.eye(4, dtype=np.uint8)) == math.inf
    assert tanner.min_distance_exhaustive(repetition(5)) == 5


def test_min_distance_seven_matches_ts_and_oracle():
    H = codes.lift(SEVEN)
    d = tanner.min_distance_exhaustive(H)
    # oracle: scan every word of weight <= 6 directly
    rows = [set(np.nonzero(r)[0]) for r in H]
    oracle = None
    for w in range(1, 7):
        for sup in itertools.combinations(range(21), w):
            s = set(sup)
            if all(len(r & s) % 2 == 0 for r in rows):
                oracle = w
                break
        if oracle:
            break
    assert d == oracle == 6
    sets = tanner.find_trapping_sets(H, d, 0)
    assert min(ts.a for ts in sets) == d


def test_min_distance_guard():
    with pytest.raises(ResourceError):
        tanner.min_distance_exhaustive(np.zeros((1, 30), dtype=np.uint8), max_dim=24)


def test_multigraph_single_cell():
    text = tanner.export_multigraph(MetExponentMatrix([[(1, 2, 7)]], 9))
    assert text.count(" -- ") == 3
    assert "c0 [shape=box]" in text and "v0 [shape=circle]" in text


def test_multigraph_met_h2():
    ME = MetExponentMatrix(
        [[(1, 2, 7), (9,), (23,), (), ()], [(12, 37), (19,), (), (32,), (11, 12)], [(), (), (33,), (), ()]], 40
    )
    text = tanner.export_multigraph(ME)
    assert sum(f"  c{i} [" in text for i in range(3)) == 3
    assert sum(f"  v{j} [" in text for j in range(5)) == 5
    assert text.count(" -- ") == int(ME.weights().sum()) == 12
    assert text.count("c1 -- v4") == 2


def test_multigraph_empty():
    text = tanner.export_multigraph(MetExponentMatrix([[()]], 3))
    assert " -- " not in text


def test_trapping_csv():
    csv = tanner.trapping_sets_csv(tanner.find_trapping_sets(eight_cycle_fixture(), 2, 4))
    assert csv.splitlines()[0] == "a,b,variables"
