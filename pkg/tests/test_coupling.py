import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import nx_has_4cycle
from nestedsc.abmatrix import ABMatrixSpec, build_ab
from nestedsc.coupling import (
    LiftAssignment,
    SCCodeSpec,
    SpreadingMatrix,
    assemble_sc,
    sc_coords,
    sc_index,
    split_components,
)
from nestedsc.gf2 import ZERO, expand

Z = ZERO

# memory-1 spreading of H(3,5) and its two components (circulant exponents, Z = zero block)
B1 = [[1, 0, 0, 0, 1], [1, 1, 1, 0, 0], [0, 0, 1, 1, 0]]
H0_GLOBAL = [[Z, 0, 0, 0, Z], [Z, Z, Z, 3, 4], [0, 2, Z, Z, 3]]
H1_GLOBAL = [[0, Z, Z, Z, 0], [0, 1, 2, Z, Z], [Z, Z, 4, 1, Z]]

# the same spreading extended by row group 3 for the column-weight-4 nested code
B11 = B1 + [[1, 0, 0, 1, 0]]
H0_NESTED = H0_GLOBAL + [[Z, 3, 1, Z, 2]]
H1_NESTED = H1_GLOBAL + [[0, Z, Z, 4, Z]]


def test_global_spreading_example_components():
    h0, h1 = split_components(ABMatrixSpec(5, 5, (0, 1, 2)).grid(), SpreadingMatrix(B1, 1))
    assert h0.cells.tolist() == H0_GLOBAL
    assert h1.cells.tolist() == H1_GLOBAL


def test_nested_spreading_example_components():
    h0, h1 = split_components(ABMatrixSpec(5, 5, (0, 1, 2, 3)).grid(), SpreadingMatrix(B11, 1))
    assert h0.cells.tolist() == H0_NESTED
    assert h1.cells.tolist() == H1_NESTED


def test_nested_components_contain_global_ones():
    g = split_components(ABMatrixSpec(5, 5, (0, 1, 2)).grid(), SpreadingMatrix(B1, 1))
    n = split_components(ABMatrixSpec(5, 5, (0, 1, 2, 3)).grid(), SpreadingMatrix(B11, 1))
    for a, b in zip(g, n):
        assert np.array_equal(a.cells, b.cells[:3])


def specs(max_m=2):
    return st.tuples(st.sampled_from([5, 7]), st.integers(1, max_m), st.integers(0, 2**32 - 1)).map(
        lambda t: SCCodeSpec(
            ABMatrixSpec(3, t[0], (0, 1, 2)),
            SpreadingMatrix.random(3, t[0], t[1], np.random.default_rng(t[2])),
            t[1] + 1,
        )
    )


@given(specs())
def test_components_sum_to_base(spec):
    comps = spec.components()
    base = spec.base.grid().cells
    stacked = np.stack([c.cells for c in comps])
    assert ((stacked != Z).sum(axis=0) == 1).all()
    assert np.array_equal(np.where(stacked != Z, stacked, 0).sum(axis=0), base)


@given(specs(), st.integers(0, 4))
def test_assembly_shape_and_band(spec, extra):
    L = spec.m + 1 + extra
    grid = spec.with_L(L).grid()
    p, m = spec.p, spec.m
    assert grid.shape == (3 * p * (L + m), L * p * p)
    h = expand(grid)
    assert set(h.col_weights().tolist()) == {3}
    # every one of column block v sits in row blocks v..v+m
    _, _, _, v, _, _ = zip(*(sc_coords(int(r), int(c), p, 3) for r, c in zip(h.r[:200], h.c[:200])))
    ys = [sc_coords(int(r), int(c), p, 3)[0] for r, c in zip(h.r[:200], h.c[:200])]
    assert all(0 <= y - vv <= m for y, vv in zip(ys, v))


@given(specs(max_m=1))
def test_spreading_keeps_graph_free_of_4cycles(spec):
    assert not nx_has_4cycle(spec.with_L(spec.m + 2).matrix())


@given(st.integers(0, 5), st.integers(0, 2), st.integers(0, 6), st.integers(0, 5), st.integers(0, 6), st.integers(0, 6))
def test_index_round_trip(y, q, s, v, j, k):
    r, c = sc_index(y, q, s, v, j, k, 7, 3)
    assert sc_coords(r, c, 7, 3) == (y, q, s, v, j, k)


def test_index_rejects_out_of_range():
    with pytest.raises(ValueError):
        sc_index(0, 3, 0, 0, 0, 0, 7, 3)


def test_short_coupling_rejected():
    comps = split_components(build_ab(3, 5), SpreadingMatrix(B1, 1))
    with pytest.raises(ValueError, match="too small"):
        assemble_sc(comps, 1)


def test_spreading_validation():
    with pytest.raises(ValueError, match="0..1"):
        SpreadingMatrix([[0, 2]], 1)
    with pytest.raises(ValueError, match="does not match"):
        split_components(build_ab(3, 5), SpreadingMatrix([[0, 1]], 1))


@given(specs(), st.booleans(), st.integers(1, 6))
def test_json_round_trip(spec, lifted, J):
    if lifted:
        rng = np.random.default_rng(J)
        shifts = {q: rng.integers(0, J, size=(spec.m + 1, spec.p, spec.p)) for q in spec.base.row_groups}
        spec = spec.with_lift(LiftAssignment(J, shifts))
    back = SCCodeSpec.from_json(spec.to_json())
    assert back == spec
    assert back.to_json() == spec.to_json()


def test_constraint_lengths():
    spec = SCCodeSpec(ABMatrixSpec(3, 7, (0, 1, 2)), SpreadingMatrix.random(3, 7, 2, np.random.default_rng(0)), 20)
    assert spec.nu == 3 * 49
    J = 5
    shifts = {q: np.zeros((3, 7, 7), np.int64) for q in (0, 1, 2)}
    assert spec.with_lift(LiftAssignment(J, shifts)).nu_lifted == 735
