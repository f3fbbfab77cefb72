from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import nx_6cycles
from nestedsc.abmatrix import ABMatrixSpec
from nestedsc.census import (
    CYCLES,
    VN_INCIDENCE,
    CycleReport,
    asymptotic_average,
    block_report,
    count_6cycles,
    list_6cycles,
    mu_decomposition,
    sc_report,
)
from nestedsc.coupling import SCCodeSpec, SpreadingMatrix
from nestedsc.gf2 import BinaryMatrix, expand


def random_spec(p, m, seed, rows=(0, 1, 2), gamma=3):
    base = ABMatrixSpec(gamma, p, rows)
    return SCCodeSpec(base, SpreadingMatrix.random(base.omega, p, m, np.random.default_rng(seed)), m + 1)


def test_hexagon_has_one_cycle():
    h = BinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert count_6cycles(h).total_cycles == 1
    assert list_6cycles(h).tolist() == [[0, 0, 1, 1, 2, 2]]


def test_no_cycles_in_a_tree():
    h = BinaryMatrix.from_dense([[1, 1, 1, 0], [0, 0, 1, 1]])
    assert count_6cycles(h).total_cycles == 0


@pytest.mark.parametrize("p", [5, 7])
def test_weight3_block_code_matches_networkx(p):
    h = expand(ABMatrixSpec(3, p, (0, 1, 2)).grid())
    assert count_6cycles(h).total_cycles == nx_6cycles(h) == p * p * (p - 1)


@given(st.sampled_from([5, 7]), st.integers(1, 2), st.integers(0, 2**32 - 1))
def test_sc_counts_match_networkx(p, m, seed):
    h = random_spec(p, m, seed).matrix()
    assert count_6cycles(h).total_cycles == nx_6cycles(h)


@given(st.integers(0, 2**32 - 1))
def test_listed_cycles_are_distinct_closed_walks(seed):
    h = random_spec(5, 1, seed).with_L(3).matrix()
    cyc = list_6cycles(h)
    assert len(cyc) == count_6cycles(h).total_cycles
    ent = h.entries
    for v1, c1, v2, c2, v3, c3 in cyc.tolist():
        assert v1 < v2 < v3 and len({c1, c2, c3}) == 3
        assert {(c1, v1), (c1, v2), (c2, v2), (c2, v3), (c3, v3), (c3, v1)} <= ent
    keys = {(tuple(r[0::2]), frozenset(r[1::2])) for r in cyc.tolist()}
    assert len(keys) == len(cyc)


@given(st.sampled_from([5, 7]), st.integers(1, 2), st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_totals_are_linear_in_coupling_length(p, m, seed, extra):
    spec = random_spec(p, m, seed)
    mu = mu_decomposition(spec)
    L = m + extra
    assert count_6cycles(spec.with_L(L).matrix()).total_cycles == sum((L - e + 1) * x for e, x in enumerate(mu, 1))


def test_report_conventions():
    rep = CycleReport(10, (4, 6), 5, VN_INCIDENCE, 2)
    assert rep.vn_incidences == 30
    assert rep.average(CYCLES) == Fraction(10, 25)
    assert rep.average() == Fraction(30, 25)
    with pytest.raises(ValueError):
        CycleReport(1, convention="edges")
    assert asymptotic_average((0, 0), 7) == 0


def test_block_reference_values():
    assert block_report(expand(ABMatrixSpec(3, 5, (0, 1, 2)).grid()), 5).average() == 12
    assert block_report(expand(ABMatrixSpec(4, 5, (0, 1, 2, 3)).grid()), 5).average() == 48


def test_sc_report_total_uses_spec_length():
    spec = random_spec(5, 2, 3).with_L(6)
    rep = sc_report(spec)
    assert rep.total_cycles == count_6cycles(spec.matrix()).total_cycles
    assert rep.L == 6
