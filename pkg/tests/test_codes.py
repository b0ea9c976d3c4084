import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcequil import codes, gf2
from qcequil.circulant import ExponentMatrix, MetExponentMatrix
from qcequil.exceptions import DomainError
import oracles

SEVEN = ExponentMatrix([[1, 2, 4], [6, 5, 3]], 7)
# multi-edge matrix with cells I1+I2+I7 etc.; the circulant size is not given
# alongside it, 40 is the smallest convenient size above every shift
MET_H2 = MetExponentMatrix(
    [
        [(1, 2, 7), (9,), (23,), (), ()],
        [(12, 37), (19,), (), (32,), (11, 12)],
        [(), (), (33,), (), ()],
    ],
    40,
)


def test_lift_identity():
    assert np.array_equal(codes.lift(ExponentMatrix([[0]], 4)), np.eye(4, dtype=np.uint8))


def test_lift_seven_weights():
    H = codes.lift(SEVEN)
    assert H.shape == (14, 21)
    assert (H.sum(axis=1) == 3).all() and (H.sum(axis=0) == 2).all()
    assert H.tolist() == oracles.lift_rule(SEVEN.entries, 7)


def test_lift_all_zero_blocks():
    assert not codes.lift(ExponentMatrix([[-1, -1], [-1, -1]], 3)).any()


def test_base_graph():
    assert codes.base_graph(ExponentMatrix([[-1]], 2)).tolist() == [[0]]
    assert codes.base_graph(ExponentMatrix([[0, 5], [-1, 2]], 6)).tolist() == [[1, 1], [0, 1]]
    assert codes.base_graph(MET_H2).tolist() == [[1, 1, 1, 0, 0], [1, 1, 0, 1, 1], [0, 0, 1, 0, 0]]


def test_lift_met_cells():
    assert np.array_equal(codes.lift_met(MetExponentMatrix([[(0,)]], 3)), np.eye(3, dtype=np.uint8))
    B = codes.lift_met(MetExponentMatrix([[(1, 2, 7)]], 9))
    assert (B.sum(axis=1) == 3).all()
    assert B.tolist() == oracles.lift_rule([[(1, 2, 7)]], 9)


def test_lift_met_h2_blocks():
    H = codes.lift_met(MET_H2)
    assert H.shape == (120, 200)
    assert (codes.block(H, 0, 0, 40).sum(axis=1) == 3).all()
    assert (codes.block(H, 2, 2, 40).sum(axis=1) == 1).all()
    assert (codes.block(H, 1, 4, 40).sum(axis=1) == 2).all()


def test_lift_met_rejects_duplicates():
    with pytest.raises(DomainError, match="cancel"):
        codes.lift_met(MetExponentMatrix([[(3, 3)]], 5))


exponents = st.tuples(st.integers(1, 3), st.integers(1, 4), st.integers(1, 8)).flatmap(
    lambda s: st.tuples(
        st.lists(st.lists(st.integers(-1, s[2] - 1), min_size=s[1], max_size=s[1]), min_size=s[0], max_size=s[0]),
        st.just(s[2]),
    )
)


@given(exponents)
def test_block_round_trip(args):
    rows, L = args
    E = ExponentMatrix(rows, L)
    assert codes.exponent_from_lift(codes.lift(E), L) == E


@given(exponents, st.randoms())
def test_base_graph_ignores_shift_values(args, rnd):
    rows, L = args
    other = [[v if v == -1 else rnd.randrange(L) for v in row] for row in rows]
    assert np.array_equal(codes.base_graph(ExponentMatrix(rows, L)), codes.base_graph(ExponentMatrix(other, L)))


# -- spatially coupled -------------------------------------------------------


def test_sc_smallest_chain():
    ME = codes.sc_construct(codes.ScParams(2, 1, 3, 1, ((1, 2),)))
    assert ME.shape == (1, 2)
    assert [sorted(c) for c in ME.cells[0]] == [[1, 2], [1, 2]]


def test_sc_width_three_diagonal():
    ME = codes.sc_construct(codes.ScParams(3, 1, 4, 4, ((1, 2, 3),)))
    assert ME.shape == (4, 12)
    W = ME.weights()
    for j in range(12):
        shifts = sorted(s for i in range(4) for s in ME.cells[i][j])
        assert shifts == [1, 2, 3]
        rows = [i for i in range(4) if W[i, j]]
        start = j // 3
        assert sorted(rows) == sorted({(start + t) % 4 for t in range(3)})


@given(
    st.integers(1, 4).flatmap(
        lambda C: st.tuples(st.just(C), st.integers(1, 3).map(lambda k: k * C), st.integers(2, 9), st.integers(1, 4))
    ),
    st.randoms(),
)
def test_sc_column_weight_is_W(params, rnd):
    C, W, N, Lm = params
    B = tuple(tuple(rnd.randrange(N) for _ in range(W)) for _ in range(C))
    ME = codes.sc_construct(codes.ScParams(W, C, N, Lm, B))
    assert (ME.weights().sum(axis=0) == W).all()


def test_sc_rejects_bad_offsets():
    with pytest.raises(DomainError):
        codes.ScParams(4, 2, 5, 2, ((0, 1, 2, 3), (0, 1, 2, 3)), D=(1, 2))
    with pytest.raises(DomainError):
        codes.ScParams(4, 2, 5, 2, ((0, 1, 2, 3), (0, 1, 2, 3)), D=(0, 0))
    with pytest.raises(DomainError):
        codes.ScParams(3, 2, 5, 2, ((0, 1, 2), (0, 1, 2)))


# -- repeat accumulate -------------------------------------------------------


def test_dual_diagonal_single_block():
    assert np.array_equal(codes.dual_diagonal(1, 3), np.eye(3, dtype=np.uint8))


def test_dual_diagonal_pattern():
    H2 = codes.dual_diagonal(3, 2)
    present = {(i, j) for i in range(3) for j in range(3) if codes.block(H2, i, j, 2).any()}
    assert present == {(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)}


def test_dual_diagonal_invertible():
    for t in range(1, 7):
        for L in range(1, 9):
            H2 = codes.dual_diagonal(t, L)
            assert gf2.det(H2) == 1
            assert gf2.nullspace(H2).shape[0] == 0


def test_ra_zero_message():
    code = codes.RaCode(ExponentMatrix([[0, 1], [2, -1]], 3))
    assert not codes.ra_encode(code, np.zeros(6, dtype=int)).any()


def test_ra_single_one_hand_solution():
    # H1 blocks P^0 over P^1 with L=2; u=(1,0) gives partial syndromes (1,0) and (0,1),
    # accumulating downward: parity (1,0) then (1,0)+(0,1)=(1,1)
    code = codes.RaCode(ExponentMatrix([[0], [1]], 2))
    x = codes.ra_encode(code, [1, 0])
    assert x.tolist() == [1, 0, 1, 0, 1, 1]


@given(st.integers(1, 4), st.integers(1, 8), st.integers(1, 3), st.randoms())
def test_ra_zero_syndrome(t, L, n1, rnd):
    E = ExponentMatrix([[rnd.randrange(-1, L) for _ in range(n1)] for _ in range(t)], L)
    code = codes.RaCode(E)
    H = codes.ra_build(code)
    u = [rnd.randrange(2) for _ in range(code.message_length)]
    x = codes.ra_encode(code, u)
    assert x[: len(u)].tolist() == u
    assert not gf2.syndrome(H, x).any()


def test_ra_length_mismatch():
    code = codes.RaCode(ExponentMatrix([[0]], 3))
    with pytest.raises(DomainError):
        codes.ra_encode(code, [1, 0])


# -- chord ring --------------------------------------------------------------


def test_chord_single_offset():
    E = codes.chord_cage_exponent(8, [1])
    assert np.array_equal(codes.lift(E), codes.lift(ExponentMatrix([[1]], 8)))


def test_chord_weight_four():
    H = codes.lift(codes.chord_cage_exponent(16, [1, 2, 4, 8]))
    assert (H.sum(axis=1) == 4).all()
    for j in range(4):
        assert (codes.block(H, 0, j, 16).sum(axis=0) == 1).all()


def test_chord_two_rows_is_five_particle_code():
    E = codes.chord_cage_exponent(11, [[10, 9, 8, 7, 6], [1, 2, 3, 4, 5]])
    assert E == ExponentMatrix([[10, 9, 8, 7, 6], [1, 2, 3, 4, 5]], 11)


def test_chord_rejects_duplicates():
    with pytest.raises(DomainError):
        codes.chord_cage_exponent(8, [1, 1])
    with pytest.raises(DomainError):
        codes.chord_cage_exponent(8, [8])
