import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcequil import chargemap as cm
from qcequil.circulant import ExponentMatrix
from qcequil.exceptions import DomainError, FormatError


def test_three_charges_e5():
    ps = cm.map_1d_three(2, 3)
    assert ps.e == 5 and ps.pairs == ((1, 4), (2, 3), (3, 2), (4, 1))
    E = ps.to_exponent()
    assert E.shape == (4, 2) and E.circulant_size == 5


def test_three_charges_e2():
    assert cm.map_1d_three(1, 1).pairs == ((1, 1),)


@given(st.integers(1, 60), st.integers(1, 60))
def test_three_charges_balanced(R1, R3):
    ps = cm.map_1d_three(R1, R3)
    assert len(ps.pairs) == ps.e - 1
    assert all((n1 + n3) % ps.e == 0 and 0 < n1 < ps.e and 0 < n3 < ps.e for n1, n3 in ps.pairs)


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_three_charges_rejects(bad):
    with pytest.raises(DomainError):
        cm.map_1d_three(bad, 2)


def test_four_charges_example():
    E = cm.map_1d_four(2, 3)
    assert E.circulant_size == 40
    assert E.to_array().tolist() == [[16, 24, 15, 25]]
    assert sorted(E.to_array()[0]) == sorted([16, 15, 24, 25])
    assert E.labels == ("a", "b1", "b2", "a+b")


def test_four_charges_unit():
    E = cm.map_1d_four(1, 1)
    assert E.circulant_size == 6 and sorted(E.to_array()[0]) == [2, 3, 3, 4]


def test_four_charges_random_identities():
    rng = np.random.default_rng(9)
    for a, b in rng.integers(1, 51, size=(500, 2)):
        a, b = int(a), int(b)
        E = cm.map_1d_four(a, b)
        c = E.circulant_size
        s_a, s_b1, s_b2, s_ab = E.to_array()[0].tolist()
        assert c == math.lcm(a + b, a + 2 * b)
        assert s_a * (a + b) == a * c and s_b1 * (a + b) == b * c
        assert s_b2 * (a + 2 * b) == b * c and s_ab * (a + 2 * b) == (a + b) * c
        assert max(s_a, s_b1, s_b2, s_ab) < c


def test_cell_examples():
    sym = cm.map_2d_cell([(1, 1)] * 4)
    assert sym.L == 4 and sym.x_shifts == (1, 1, 1, 1) and sym.y_shifts == (1, 1, 1, 1)
    m = cm.map_2d_cell([(1, 2), (2, 2), (3, 2), (4, 2)])
    assert m.L == 40 and m.x_shifts == (4, 8, 12, 16) and m.y_shifts == (10, 10, 10, 10)


def test_cell_origin_and_zero_projection():
    m = cm.map_2d_cell([(11, 12), (12, 12), (13, 12), (14, 12)], origin=(10, 10))
    assert m.x_shifts == (4, 8, 12, 16)
    with pytest.raises(DomainError):
        cm.map_2d_cell([(0, 1), (1, 1), (1, 1), (1, 1)])


@given(st.lists(st.tuples(st.integers(1, 30), st.integers(1, 30)), min_size=4, max_size=4))
def test_cell_row_sums(pos):
    m = cm.map_2d_cell(pos)
    assert sum(m.x_shifts) == m.L and sum(m.y_shifts) == m.L
    assert all(s < m.L for s in m.x_shifts + m.y_shifts)


COORDS = {1: (1, 1), 2: (2, 1), 3: (1, 2), 4: (2, 2), 5: (3, 1), 6: (3, 2), 7: (4, 1), 8: (4, 2)}


def test_coupled_two_cells():
    maps = cm.map_coupled_cells([(1, 2, 3, 4), (2, 5, 4, 6)], COORDS)
    assert 2 in maps[0].particles and 2 in maps[1].particles
    assert 4 in maps[0].particles and 4 in maps[1].particles
    E = cm.coupled_exponent(maps)
    assert E.shape == (4, 6)
    A = E.to_array()
    # particle 1 is only in the first cell, particle 5 only in the second
    assert (A[2:, E.labels.index("1")] == -1).all() and (A[:2, E.labels.index("5")] == -1).all()
    assert E.circulant_size == math.lcm(maps[0].L, maps[1].L)


def test_coupled_single_is_plain_cell():
    (one,) = cm.map_coupled_cells([(1, 2, 3, 4)], COORDS)
    assert one == cm.map_2d_cell([COORDS[p] for p in (1, 2, 3, 4)], particles=(1, 2, 3, 4))


def test_coupled_three_chain():
    cells = [(1, 2, 3, 4), (2, 5, 4, 6), (5, 7, 6, 8)]
    maps = cm.map_coupled_cells(cells, COORDS)
    middle = set(maps[1].particles)
    assert middle & set(maps[0].particles) == {2, 4}
    assert middle & set(maps[2].particles) == {5, 6}
    for cell, m in zip(cells, maps):
        assert m.particles == cell


def test_coupled_inconsistent_coordinates():
    recs = [(1, 1, 1), (2, 2, 1), (3, 1, 2), (4, 2, 2), (2, 9, 9)]
    with pytest.raises(DomainError):
        cm.map_coupled_cells([(1, 2, 3, 4)], recs)


def test_hex_example():
    nodes = [(0, 0), (60, 0), (30, 52), (-30, 52), (-60, 0), (-30, -52), (30, -52)]
    E = cm.hexagonal_rotation_map(60, math.radians(30), 6, nodes)
    assert E.circulant_size == 6 and E.shape == (2, 7)
    A = E.to_array()
    assert A[0, 0] == 0 and A[1, 0] == 0
    assert 60 * (1 - math.cos(math.radians(30))) == pytest.approx(8.038, abs=1e-3)
    assert A[0, 1] == 0
    # y: 52 - 52 sin 30 = 26 -> floor(26 / 10) = 2
    assert A[1, 2] == 2


@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=7, max_size=7))
def test_hex_alpha_zero(nodes):
    assert (cm.hexagonal_rotation_map(60, 0.0, 6, nodes).to_array()[0] == 0).all()


def test_hex_step_zero():
    with pytest.raises(DomainError):
        cm.hexagonal_rotation_map(5, 0.1, 6, [(0, 0)] * 7)


def test_barycentric():
    tri = [(0, 0), (3, 0), (0, 3)]
    assert cm.barycentric((1, 1), tri) == pytest.approx((1 / 3, 1 / 3, 1 / 3))
    assert cm.barycentric((0, 0), tri) == pytest.approx((1, 0, 0))
    assert cm.barycentric((1.5, 1.5), tri) == pytest.approx((0, 0.5, 0.5))
    with pytest.raises(DomainError):
        cm.barycentric((0, 0), [(0, 0), (1, 1), (2, 2)])


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_barycentric_reconstructs(px, py):
    tri = np.array([(0.0, 0.0), (4.0, 1.0), (1.0, 3.0)])
    lam = np.array(cm.barycentric((px, py), tri))
    assert lam.sum() == pytest.approx(1)
    assert lam @ tri == pytest.approx([px, py], abs=1e-9)


def test_geometry_examples():
    five = cm.geometry_from_exponent(ExponentMatrix([[10, 9, 8, 7, 6], [1, 2, 3, 4, 5]], 11))
    assert five.shape == (5, 2) and five[0] == pytest.approx([2 * np.pi * 10 / 11, 2 * np.pi / 11])
    one = cm.geometry_from_exponent(ExponentMatrix([[0], [0]], 5))
    assert one.tolist() == [[0.0, 0.0]]
    three = cm.geometry_from_exponent(ExponentMatrix([[1, 2, 4], [6, 5, 3]], 7), centered=True)
    assert np.abs(three.mean(axis=0)).max() < 1e-12


def test_geometry_zero_block_and_rows():
    g = cm.geometry_from_exponent(ExponentMatrix([[-1, 2]], 5))
    assert math.isnan(g[0, 0])
    with pytest.raises(DomainError):
        cm.geometry_from_exponent(ExponentMatrix([[1], [2], [3]], 5))


@given(st.integers(2, 40), st.data())
def test_angle_round_trip(L, data):
    shifts = data.draw(st.lists(st.integers(0, L - 1), min_size=2, max_size=6))
    ang = cm.geometry_from_exponent(ExponentMatrix([shifts], L))[:, 0]
    gaps = cm.quantize_angles(np.diff(ang), L)
    assert gaps.tolist() == [int(v) % L for v in np.diff(shifts)]


def test_read_charges_csv():
    recs = cm.read_charges_csv("id,q,x,y\na,1,0.5,2\nb,2,1.5,\n")
    assert recs[0] == cm.ChargeRecord("a", 1.0, 0.5, 2.0) and recs[1].y is None
    with pytest.raises(FormatError):
        cm.read_charges_csv("id,x\na,1\n")
    with pytest.raises(FormatError):
        cm.read_charges_csv("id,q,x\na,one,1\n")
