import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import dense_rank_gf2, shift_block
from nestedsc.gf2 import ZERO, BinaryMatrix, CirculantGrid, expand, from_alist, rank_gf2, tanner_adjacency, to_alist


def dense_matrices(max_rows=8, max_cols=10):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_expand_builds_shift_blocks():
    grid = CirculantGrid(np.array([[0, 2], [ZERO, 4]]), 5)
    d = expand(grid).to_dense()
    assert d.shape == (10, 10)
    assert np.array_equal(d[:5, :5], shift_block(0, 5))
    assert np.array_equal(d[:5, 5:], shift_block(2, 5))
    assert not d[5:, :5].any()
    assert np.array_equal(d[5:, 5:], shift_block(4, 5))


def test_shift_one_moves_ones_down_a_row():
    d = expand(CirculantGrid(np.array([[1]]), 3)).to_dense()
    assert d.tolist() == [[0, 0, 1], [1, 0, 0], [0, 1, 0]]


@given(dense_matrices())
def test_dense_round_trip(a):
    m = BinaryMatrix.from_dense(a)
    assert np.array_equal(m.to_dense(), np.array(a))
    assert m.nnz == int(np.sum(a))


@given(dense_matrices())
def test_rank_matches_dense_elimination(a):
    assert rank_gf2(BinaryMatrix.from_dense(a)) == dense_rank_gf2(a)


@given(dense_matrices())
def test_alist_round_trip(a):
    m = BinaryMatrix.from_dense(a)
    assert from_alist(to_alist(m)) == m


@given(dense_matrices(), st.data())
def test_syndrome_is_matrix_product_mod2(a, data):
    m = BinaryMatrix.from_dense(a)
    x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=m.cols, max_size=m.cols)))
    assert np.array_equal(m.syndrome(x), (np.array(a) @ x) % 2)


def test_weights_and_tanner_lists():
    m = BinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    assert m.row_weights().tolist() == [2, 2]
    assert m.col_weights().tolist() == [1, 2, 1]
    g = tanner_adjacency(m)
    assert g.check_nbrs == ((0, 1), (1, 2))
    assert g.var_nbrs == ((0,), (0, 1), (1,))
    assert g.num_edges == 4


def test_rejects_bad_entries():
    with pytest.raises(ValueError, match="out of range"):
        BinaryMatrix.from_entries(2, 2, [(2, 0)])
    with pytest.raises(ValueError, match="duplicate"):
        BinaryMatrix.from_entries(2, 2, [(0, 0), (0, 0)])


def test_alist_detects_inconsistent_sections():
    text = to_alist(BinaryMatrix.from_dense([[1, 0], [1, 1]])).split("\n")
    text[-2] = "1 0"
    with pytest.raises(ValueError):
        from_alist("\n".join(text))


def test_identity_rank():
    assert rank_gf2(BinaryMatrix.identity(7)) == 7
