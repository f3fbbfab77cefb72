"""Brute-force 6-cycle census, coupled-span decomposition and asymptotic averages.

This is the ground truth the line-counting engine is checked against, so it
only uses the Tanner graph: no circulant or spreading structure is assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .coupling import SCCodeSpec, _assemble
from .gf2 import BinaryMatrix, expand, tanner_adjacency

CYCLES = "cycles"
VN_INCIDENCE = "vn-incidence"
CONVENTIONS = (CYCLES, VN_INCIDENCE)


@dataclass(frozen=True)
class CycleReport:
    total_cycles: int
    per_block_span: tuple[int, ...] = ()
    p: int = 0
    convention: str = VN_INCIDENCE
    L: int = 1

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")

    @property
    def vn_incidences(self) -> int:
        return 3 * self.total_cycles

    def average(self, convention: str | None = None) -> Fraction:
        """``sum(mu_e) / p^2``, scaled by 3 under the vn-incidence convention."""
        return asymptotic_average(self.per_block_span, self.p, convention or self.convention)

    @property
    def asymptotic_average(self) -> Fraction:
        return self.average()

    def as_dict(self) -> dict:
        return {
            "total_cycles": self.total_cycles,
            "vn_incidences": self.vn_incidences,
            "per_block_span": list(self.per_block_span),
            "L": self.L,
            "p": self.p,
            "convention": self.convention,
            "A_cycles": str(self.average(CYCLES)) if self.p else None,
            "A_vn_incidence": str(self.average(VN_INCIDENCE)) if self.p else None,
        }


def list_6cycles(m: BinaryMatrix) -> np.ndarray:
    """Every 6-cycle once, as rows ``[v1, c1, v2, c2, v3, c3]``.

    The walk is ``v1-c1-v2-c2-v3-c3-v1`` with ``v1 < v2 < v3``.
    """
    g = tanner_adjacency(m)
    check_bits = [0] * m.rows
    for c, nb in enumerate(g.check_nbrs):
        bits = 0
        for v in nb:
            bits |= 1 << v
        check_bits[c] = bits
    out = []
    for v1, cs in enumerate(g.var_nbrs):
        for ca in cs:
            for cb in cs:
                if ca == cb:
                    continue
                bits_b = check_bits[cb]
                for v2 in g.check_nbrs[ca]:
                    if v2 <= v1:
                        continue
                    for cc in g.var_nbrs[v2]:
                        if cc == ca or cc == cb:
                            continue
                        common = (check_bits[cc] & bits_b) >> (v2 + 1)
                        while common:
                            low = common & -common
                            v3 = v2 + low.bit_length()
                            out.append((v1, ca, v2, cc, v3, cb))
                            common ^= low
    return np.array(out, dtype=np.int64).reshape(-1, 6)


def count_6cycles(m: BinaryMatrix) -> CycleReport:
    """Number of distinct 6-cycles in the Tanner graph of ``m``."""
    g = tanner_adjacency(m)
    check_bits = [0] * m.rows
    for c, nb in enumerate(g.check_nbrs):
        bits = 0
        for v in nb:
            bits |= 1 << v
        check_bits[c] = bits
    total = 0
    for v1, cs in enumerate(g.var_nbrs):
        for ca in cs:
            for cb in cs:
                if ca == cb:
                    continue
                bits_b = check_bits[cb]
                for v2 in g.check_nbrs[ca]:
                    if v2 <= v1:
                        continue
                    for cc in g.var_nbrs[v2]:
                        if cc != ca and cc != cb:
                            total += ((check_bits[cc] & bits_b) >> (v2 + 1)).bit_count()
    return CycleReport(total)


def mu_decomposition(spec: SCCodeSpec) -> tuple[int, ...]:
    """``(mu_1..mu_{m+1})``: cycles spanning exactly ``e`` contiguous column blocks.

    Computed by brute force on assemblies with ``1..m+1`` column blocks; the
    totals ``C(L) = sum_e (L-e+1) mu_e`` are inverted by second differences.
    """
    comps = spec.components()
    m = spec.m
    totals = [0, 0]  # C(-1), C(0)
    for L in range(1, m + 2):
        totals.append(count_6cycles(expand(_assemble(comps, L))).total_cycles)
    mu = tuple(totals[i + 2] - 2 * totals[i + 1] + totals[i] for i in range(m + 1))
    if min(mu) < 0:
        raise AssertionError(f"negative span count {mu}")
    return mu


def asymptotic_average(mu: Sequence[int], p: int, convention: str = VN_INCIDENCE) -> Fraction:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    scale = 3 if convention == VN_INCIDENCE else 1
    return Fraction(scale * sum(mu), p * p)


def sc_report(spec: SCCodeSpec, convention: str = VN_INCIDENCE) -> CycleReport:
    """Oracle report for ``spec`` at its own coupling length."""
    mu = mu_decomposition(spec)
    total = sum((spec.L - e + 1) * x for e, x in enumerate(mu, start=1))
    return CycleReport(total, mu, spec.p, convention, spec.L)


def block_report(h: BinaryMatrix, p: int, convention: str = VN_INCIDENCE) -> CycleReport:
    """Report for an uncoupled matrix: all cycles count as span 1."""
    n = count_6cycles(h).total_cycles
    return CycleReport(n, (n,), p, convention, 1)
