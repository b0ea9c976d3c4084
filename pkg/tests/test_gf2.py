import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qcequil import gf2
from qcequil.exceptions import DomainError, FormatError
import oracles

binary = st.tuples(st.integers(1, 7), st.integers(1, 9)).flatmap(
    lambda s: arrays(np.uint8, s, elements=st.integers(0, 1))
)


@given(binary)
def test_nullspace_matches_enumeration(H):
    basis = gf2.nullspace(H)
    assert not gf2.matmul(basis, H.T).any()
    words = oracles.all_codewords(H.tolist())
    assert len(words) == 2 ** basis.shape[0]
    assert gf2.rank(H) + basis.shape[0] == H.shape[1]


@given(binary)
def test_alist_round_trip(H):
    assert np.array_equal(gf2.from_alist(gf2.to_alist(H)), H)


@given(binary)
def test_pack_round_trip(H):
    assert np.array_equal(gf2.unpack(gf2.pack(H), H.shape[1]), H)


def test_alist_known_layout():
    H = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
    assert gf2.to_alist(H) == "3 2\n2 2\n1 1 2\n2 2\n1 0\n2 0\n1 2\n1 3\n2 3\n"


def test_alist_inconsistent_degree():
    bad = "2 1\n1 2\n1 1\n2\n1\n0\n1 2\n"
    with pytest.raises(FormatError):
        gf2.from_alist(bad)


def test_det_identity_and_singular():
    assert gf2.det(np.eye(4, dtype=np.uint8)) == 1
    assert gf2.det(np.ones((2, 2), dtype=np.uint8)) == 0


def test_non_binary_rejected():
    with pytest.raises(DomainError):
        gf2.as_binary([[0, 2]])
