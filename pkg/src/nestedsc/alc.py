"""Adapted line counting: closed-form 6-cycle counts for column-weight-3 regions.

A 6-cycle in a column-weight-3 AB matrix whose rows are ``0, q2, q3`` has
columns ``c1 < c2`` joined by the identity row, ``c2, c3`` joined by the
``q2`` row and ``c3, c1`` by the ``q3`` row. Writing ``c = j p + k``, every
such cycle is a point with integer ``c1`` on the line ``c2 - c1 = n p`` of
the ``(c1, c2)`` plane, inside a polygon cut out by the column windows of
``c1``, ``c2`` and the band that keeps ``c3`` inside its column group.

Row groups without an identity member are handled by relabelling the
columns inside each column group (``k -> k + qa j``), which turns the
multipliers ``(qa, qb, qc)`` into ``(0, qb - qa, qc - qa)`` without changing
the Tanner graph.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .abmatrix import ABMatrixSpec
from .census import VN_INCIDENCE, CycleReport
from .coupling import SCCodeSpec, SpreadingMatrix
from .gf2 import ZERO, CirculantGrid

Point = tuple[Fraction, Fraction]


# ----------------------------------------------------------------------------
# range of c3 and line geometry


@dataclass(frozen=True)
class C3Range:
    """``lower <=/< c2 - slope*c1 <=/< upper``: the band keeping ``c3`` in groups ``alpha..beta-1``.

    ``alpha_intercept`` / ``beta_intercept`` are the vertical intercepts of the
    lines obtained from ``alpha`` and ``beta``. When ``q3 < q2`` the alpha line
    is the closed lower edge; when ``q3 > q2`` the band flips and the alpha
    line becomes the closed upper edge.
    """

    slope: Fraction
    alpha_intercept: Fraction
    beta_intercept: Fraction

    @property
    def lower(self) -> Fraction:
        return min(self.alpha_intercept, self.beta_intercept)

    @property
    def upper(self) -> Fraction:
        return max(self.alpha_intercept, self.beta_intercept)

    @property
    def lower_closed(self) -> bool:
        return self.alpha_intercept <= self.beta_intercept

    @property
    def upper_closed(self) -> bool:
        return not self.lower_closed

    def contains(self, c1, c2) -> bool:
        t = Fraction(c2) - self.slope * Fraction(c1)
        lo_ok = t >= self.lower if self.lower_closed else t > self.lower
        hi_ok = t <= self.upper if self.upper_closed else t < self.upper
        return lo_ok and hi_ok


def c3_range(q2: int, q3: int, lam: int, alpha: int, beta: int, p: int) -> C3Range:
    """Band on the ``(c1, c2)`` plane equivalent to ``alpha <= j3 <= beta - 1``."""
    if q2 == 0 or q3 == 0:
        raise ValueError("q2 and q3 must be non-zero")
    if q2 == q3:
        raise ValueError("q2 and q3 must differ")
    if not alpha < beta:
        raise ValueError("need alpha < beta")
    if abs(lam) > 2 * p - 2:
        raise ValueError(f"lambda={lam} outside {2 - 2 * p}..{2 * p - 2}")
    r = Fraction(q3, q2)
    shift = Fraction(lam * p * p, q2)
    return C3Range(r, (1 - r) * alpha * p + shift, (1 - r) * beta * p + shift)


def _meet_diagonal(slope: Fraction, intercept: Fraction, offset: int) -> Point:
    """Intersection of ``c2 = slope*c1 + intercept`` with ``c2 = c1 + offset``."""
    x = (intercept - offset) / (1 - slope)
    return x, x + offset


@dataclass(frozen=True)
class LineGeometry:
    """Intersection points of ``c2 - c1 = n p`` with the boundary lines of one window.

    ``offset`` records the translation (in columns) between the frame of the
    window and the column index of the matrix the region was taken from.
    """

    p: int
    q2: int
    q3: int
    lam: int
    w1: int
    w2: int
    w3: int
    w4: int
    alpha: int
    beta: int
    n: int
    offset: int = 0
    phi1: Point = field(init=False)
    phi2: Point = field(init=False)
    theta1: Point = field(init=False)
    theta2: Point = field(init=False)
    theta3: Point = field(init=False)
    theta4: Point = field(init=False)
    sigma1: Point = field(init=False)
    sigma2: Point = field(init=False)
    nu1: Fraction = field(init=False)
    nu2: Fraction = field(init=False)

    def __post_init__(self):
        p = self.p
        if not (0 <= self.w1 <= p - 2 and 1 <= self.w2 <= p - 1):
            raise ValueError("c1 window out of range")
        if not (self.w1 + 1 <= self.w3 <= p - 1 and self.w2 + 1 <= self.w4 <= p):
            raise ValueError("c2 window out of range")
        if not (0 <= self.alpha <= p - 1 and 1 <= self.beta <= p and self.alpha < self.beta):
            raise ValueError("c3 window out of range")
        if not 1 <= self.n <= self.w4 - self.w1 - 1:
            raise ValueError("line offset out of range")
        band = c3_range(self.q2, self.q3, self.lam, self.alpha, self.beta, p)
        d = self.n * p
        r = band.slope
        phi1 = _meet_diagonal(r, band.alpha_intercept, d)
        phi2 = _meet_diagonal(r, band.beta_intercept, d)
        # along the diagonal c3 grows with c1, so the alpha end is the lower one
        t1 = (Fraction(self.w1 * p), Fraction(self.w1 * p + d))
        t2 = (Fraction(self.w2 * p), Fraction(self.w2 * p + d))
        t3 = (Fraction(self.w3 * p - d), Fraction(self.w3 * p))
        t4 = (Fraction(self.w4 * p - d), Fraction(self.w4 * p))
        s1 = (max(phi1[0], t1[0], t3[0]), max(phi1[1], t1[1], t3[1]))
        s2 = (min(phi2[0], t2[0], t4[0]), min(phi2[1], t2[1], t4[1]))
        shift = Fraction(self.lam * p * p, self.q2)
        nu1 = self.alpha * p + (self.w2 - self.alpha) * r * p + shift
        nu2 = self.beta * p + (self.w1 - self.beta) * r * p + shift
        for name, val in [
            ("phi1", phi1), ("phi2", phi2), ("theta1", t1), ("theta2", t2),
            ("theta3", t3), ("theta4", t4), ("sigma1", s1), ("sigma2", s2),
            ("nu1", nu1), ("nu2", nu2),
        ]:
            object.__setattr__(self, name, val)

    def conditions_hold(self) -> bool:
        """Boundary conditions under which the diagonal crosses the polygon."""
        p = self.p
        if self.q3 < self.q2:
            side = self.theta1[1] < self.nu2 and self.theta2[1] > self.nu1
        else:
            side = self.w3 * p < self.phi2[1] and self.w4 * p > self.phi1[1]
        if not side:
            return False
        t1, t2, s1, s2 = self.theta1, self.theta2, self.sigma1, self.sigma2
        inside = all(t1[0] <= s[0] <= t2[0] and t1[1] <= s[1] <= t2[1] for s in (s1, s2))
        return inside and s2[0] > s1[0]

    def length(self) -> int:
        """Integer points on the diagonal between ``sigma1`` (inclusive) and ``sigma2``."""
        if not self.conditions_hold():
            return 0
        dx = self.sigma2[0] - self.sigma1[0]
        dy = self.sigma2[1] - self.sigma1[1]
        rad = (dx * dx + dy * dy) / 2
        if rad.denominator != 1:
            raise AssertionError(f"non-integral squared length {rad}")
        root = math.isqrt(rad.numerator)
        if root * root != rad.numerator:
            raise AssertionError(f"squared length {rad} is not a perfect square")
        return root


def line_count(geom: LineGeometry) -> int:
    return geom.length()


def third_group(q2: int, q3: int, j1: int, j2: int, p: int) -> tuple[int, int]:
    """``(j3, lambda)`` with ``(q2 - q3) j3 + lambda p = q2 j2 - q3 j1``."""
    d = (q2 - q3) % p
    if d == 0:
        raise ValueError("q2 and q3 coincide mod p")
    j3 = (q2 * j2 - q3 * j1) * pow(d, -1, p) % p
    num = q2 * j2 - q3 * j1 - (q2 - q3) * j3
    lam, rem = divmod(num, p)
    assert rem == 0
    return j3, lam


@lru_cache(maxsize=None)
def block_line_count(p: int, q2: int, q3: int, j1: int, j2: int) -> int:
    """6-cycles of one block cycle: column groups ``j1 < j2`` joined by row group 0.

    Sums the line lengths over every admissible offset ``n`` of the window
    ``w1 = j1, w2 = j1 + 1, w3 = j2, w4 = j2 + 1`` with ``c3`` confined to
    column group ``j3``.
    """
    if not 0 <= j1 < j2 < p:
        raise ValueError("need 0 <= j1 < j2 < p")
    j3, lam = third_group(q2, q3, j1, j2, p)
    total = 0
    for n in range(1, j2 - j1 + 1):
        total += LineGeometry(p, q2, q3, lam, j1, j1 + 1, j2, j2 + 1, j3, j3 + 1, n).length()
    return total


# ----------------------------------------------------------------------------
# regions


@dataclass(frozen=True, eq=False)
class RegionDescriptor:
    """Column-weight-3 region of a memory-``m`` SC matrix.

    ``rows`` holds ``(y, q)`` for the identity row group (first) and the two
    other row groups; ``q`` is the multiplier in the relabelled frame (0 for
    the identity row). ``labels`` keeps the original row-group labels.
    ``blocks`` is the number of column blocks the region covers and
    ``min_span`` the smallest block span counted: single-block regions count
    everything, multi-block regions only cycles starting in column block 0
    and reaching at least one further block. ``masks[i, j]`` is the column
    block in which row ``i`` has a circulant at residue ``j``, or -1.
    """

    rows: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]
    blocks: int
    min_span: int
    labels: tuple[int, int, int] = (0, 1, 2)
    masks: Optional[np.ndarray] = None

    def __post_init__(self):
        rows = tuple((int(y), int(q)) for y, q in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != 3:
            raise ValueError("a region has exactly three row groups")
        if rows[0][1] != 0:
            raise ValueError("first row group must be the identity group")
        if rows[1][1] == rows[2][1] or 0 in (rows[1][1], rows[2][1]):
            raise ValueError("the two non-identity multipliers must differ and be non-zero")
        if self.blocks < 1 or self.min_span not in (1, 2):
            raise ValueError("bad block structure")
        if self.masks is not None:
            mk = np.array(self.masks, dtype=np.int64)
            mk.setflags(write=False)
            object.__setattr__(self, "masks", mk)

    @property
    def q2(self) -> int:
        return self.rows[1][1]

    @property
    def q3(self) -> int:
        return self.rows[2][1]

    def validate(self, p: int) -> None:
        mk = self.masks
        if mk is None:
            raise ValueError("malformed masks: region template has no masks")
        if mk.shape != (3, p):
            raise ValueError(f"malformed masks: shape {mk.shape}, expected (3, {p})")
        if mk.min() < -1 or mk.max() >= self.blocks:
            raise ValueError("malformed masks: block index out of range")
        if any(q >= p for _, q in self.rows):
            raise ValueError("multiplier not reduced mod p")

    def with_masks(self, masks: np.ndarray) -> "RegionDescriptor":
        return RegionDescriptor(self.rows, self.blocks, self.min_span, self.labels, masks)


def _feasible(ys: tuple[int, int, int], m: int) -> bool:
    """Can rows at blocks ``ys`` close a cycle starting in column block 0 and spanning >= 2 blocks?"""
    y0, ya, yb = ys

    def reach(y, v):
        return 0 <= y - v <= m

    for v1, v2, v3 in itertools.product(range(m + 1), repeat=3):
        if min(v1, v2, v3) != 0 or max(v1, v2, v3) == 0:
            continue
        if not (reach(y0, v1) and reach(y0, v2)):
            continue
        for yc2, yc1 in ((ya, yb), (yb, ya)):
            if reach(yc2, v2) and reach(yc2, v3) and reach(yc1, v3) and reach(yc1, v1):
                return True
    return False


def enumerate_regions(m: int) -> list[RegionDescriptor]:
    """Region templates (no masks) for memory ``m``.

    Single-block regions: every assignment of the three row groups to row
    blocks ``0..m`` over one column block. Multi-block regions: row-block
    triples in ``0..2m`` over ``m+1`` column blocks that can host a cycle
    starting in column block 0 and spanning at least two blocks.
    """
    if m < 0:
        raise ValueError("memory must be non-negative")
    out = []
    for ys in itertools.product(range(m + 1), repeat=3):
        out.append(RegionDescriptor(tuple(zip(ys, (0, 1, 2))), 1, 1))
    for ys in itertools.product(range(2 * m + 1), repeat=3):
        if _feasible(ys, m):
            out.append(RegionDescriptor(tuple(zip(ys, (0, 1, 2))), m + 1, 2))
    return out


def region_bound(m: int) -> int:
    """Upper bound ``(3m+2)(C(2(m+1),2) - 2 C(m+1,2))`` on the number of regions."""
    return (3 * m + 2) * (math.comb(2 * (m + 1), 2) - 2 * math.comb(m + 1, 2))


def relabel_multipliers(groups: Sequence[int], p: int) -> tuple[int, int, int]:
    """Multipliers after moving the first group to the identity: ``(0, qb-qa, qc-qa) mod p``."""
    qa, qb, qc = groups
    out = (0, (qb - qa) % p, (qc - qa) % p)
    if out[1] == 0 or out[2] == 0 or out[1] == out[2]:
        raise ValueError(f"row groups {tuple(groups)} are not distinct mod {p}")
    return out


def bind_region(template: RegionDescriptor, groups: Sequence[int], spread_rows: np.ndarray, p: int) -> RegionDescriptor:
    """Attach multipliers and presence masks derived from the spreading rows of ``groups``.

    Row copy ``(y, q)`` has a circulant in column block ``v`` at residue ``j``
    exactly when ``b[q, j] == y - v``.
    """
    spread_rows = np.asarray(spread_rows, dtype=np.int64)
    mult = relabel_multipliers(groups, p)
    ys = np.array([y for y, _ in template.rows])
    v = ys[:, None] - spread_rows
    masks = np.where((v >= 0) & (v < template.blocks), v, -1)
    rows = tuple(zip(ys.tolist(), mult))
    return RegionDescriptor(rows, template.blocks, template.min_span, tuple(int(g) for g in groups), masks)


def _region_spans(region: RegionDescriptor, p: int) -> dict[int, int]:
    region.validate(p)
    mk = region.masks
    out: dict[int, int] = {}
    present = [j for j in range(p) if mk[0, j] >= 0]
    for a, b in itertools.combinations(present, 2):
        j1, j2 = a, b
        v1, v2 = int(mk[0, j1]), int(mk[0, j2])
        # row 1 joins (c2, c3) and row 2 joins (c3, c1), then the reverse
        for rc2, rc1 in ((1, 2), (2, 1)):
            q2, q3 = region.rows[rc2][1], region.rows[rc1][1]
            j3, _ = third_group(q2, q3, j1, j2, p)
            v3 = int(mk[rc2, j3])
            if v3 < 0 or mk[rc1, j3] != v3 or mk[rc2, j2] != v2 or mk[rc1, j1] != v1:
                continue
            lo, hi = min(v1, v2, v3), max(v1, v2, v3)
            if lo != 0 or hi - lo + 1 < region.min_span:
                continue
            cnt = block_line_count(p, q2, q3, j1, j2)
            if cnt:
                e = hi - lo + 1
                out[e] = out.get(e, 0) + cnt
    return out


def count_region(region: RegionDescriptor, p: int) -> int:
    """Number of 6-cycles in one masked region."""
    return sum(_region_spans(region, p).values())


def count_region_by_span(region: RegionDescriptor, p: int) -> dict[int, int]:
    return _region_spans(region, p)


def regions_from_spreading(b: SpreadingMatrix, row_groups: Sequence[int], positions: Sequence[int], p: int) -> list[RegionDescriptor]:
    """All masked regions of one row-group triple (given as row positions in ``b``)."""
    groups = [row_groups[i] for i in positions]
    rows = b.entries[list(positions)]
    return [bind_region(t, groups, rows, p) for t in enumerate_regions(b.m)]


# ----------------------------------------------------------------------------
# vectorised totals


class AlcEvaluator:
    """Span counts of all regions of fixed row-group triples, vectorised over regions.

    Precomputes, per triple, every block cycle (ordered residues ``j1 < j2``,
    both orientations) with its line count, and the region templates of
    memory ``m``; evaluating a spreading matrix is then a handful of numpy
    gathers.
    """

    def __init__(self, p: int, m: int, row_groups: Sequence[int], positions: Iterable[Sequence[int]]):
        self.p = p
        self.m = m
        self.row_groups = tuple(row_groups)
        self.positions = [tuple(t) for t in positions]
        templates = enumerate_regions(m)
        self.ys = np.array([[y for y, _ in t.rows] for t in templates], dtype=np.int64)
        self.blocks = np.array([t.blocks for t in templates], dtype=np.int64)
        self.min_span = np.array([t.min_span for t in templates], dtype=np.int64)
        self._records = [self._block_cycles(t) for t in self.positions]

    def _block_cycles(self, pos):
        p = self.p
        mult = relabel_multipliers([self.row_groups[i] for i in pos], p)
        rec = []
        for j1, j2 in itertools.combinations(range(p), 2):
            for rc2, rc1 in ((1, 2), (2, 1)):
                j3, _ = third_group(mult[rc2], mult[rc1], j1, j2, p)
                w = block_line_count(p, mult[rc2], mult[rc1], j1, j2)
                if w:
                    rec.append((j1, j2, j3, rc2, rc1, w))
        return np.array(rec, dtype=np.int64).reshape(-1, 6)

    def spans(
        self,
        entries: np.ndarray,
        subset: Optional[Sequence[int]] = None,
        present: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """``mu[e-1]``: 6-cycles spanning exactly ``e`` column blocks, summed over the triples.

        ``present`` (same shape as ``entries``) marks circulants that exist;
        the others are treated as all-zero blocks.
        """
        entries = np.asarray(entries, dtype=np.int64)
        mu = np.zeros(self.m + 1, dtype=np.int64)
        idx = range(len(self.positions)) if subset is None else subset
        for t in idx:
            rec = self._records[t]
            if not len(rec):
                continue
            rows = entries[list(self.positions[t])]
            v = self.ys[:, :, None] - rows[None, :, :]
            keep = (v >= 0) & (v < self.blocks[:, None, None])
            if present is not None:
                keep &= np.asarray(present, bool)[list(self.positions[t])][None, :, :]
            v = np.where(keep, v, -1)
            j1, j2, j3, rc2, rc1, w = rec.T
            v1 = v[:, 0, j1]
            v2 = v[:, 0, j2]
            v3 = v[:, rc2, j3]
            ok = (
                (v1 >= 0) & (v2 >= 0) & (v3 >= 0)
                & (v[:, rc1, j3] == v3) & (v[:, rc2, j2] == v2) & (v[:, rc1, j1] == v1)
            )
            lo = np.minimum(np.minimum(v1, v2), v3)
            hi = np.maximum(np.maximum(v1, v2), v3)
            span = hi - lo + 1
            ok &= (lo == 0) & (span >= self.min_span[:, None])
            mu += np.bincount(span[ok] - 1, weights=np.broadcast_to(w, ok.shape)[ok], minlength=self.m + 1).astype(np.int64)[: self.m + 1]
        return mu

    def total(self, entries: np.ndarray, L: int, subset: Optional[Sequence[int]] = None, present=None) -> int:
        mu = self.spans(entries, subset, present)
        return int(sum((L - e + 1) * x for e, x in enumerate(mu.tolist(), start=1)))


def all_triples(omega: int) -> list[tuple[int, int, int]]:
    return list(itertools.combinations(range(omega), 3))


def _infer_multipliers(grid: CirculantGrid) -> tuple[tuple[int, ...], np.ndarray]:
    """Row multipliers ``q`` and presence of a (possibly punctured) AB grid."""
    p = grid.block_size
    cells = grid.cells
    if cells.shape[1] != p:
        raise ValueError("unsupported structure: grid must have p column groups")
    qs = []
    for row in cells:
        cand = None
        for j, z in enumerate(row.tolist()):
            if z == ZERO:
                continue
            if j == 0:
                if z != 0:
                    raise ValueError("unsupported structure: not an AB grid")
                continue
            q = z * pow(j, -1, p) % p
            if cand is None:
                cand = q
            elif cand != q:
                raise ValueError("unsupported structure: not an AB grid")
        if cand is None:
            raise ValueError("unsupported structure: multiplier of a row group is undetermined")
        qs.append(cand)
    if len(set(qs)) != len(qs):
        raise ValueError("unsupported structure: repeated row multiplier")
    return tuple(qs), cells != ZERO


def alc_total(
    target: Union[SCCodeSpec, ABMatrixSpec, CirculantGrid],
    triples: Optional[Sequence[Sequence[int]]] = None,
    convention: str = VN_INCIDENCE,
) -> CycleReport:
    """6-cycle census computed by line counting.

    ``triples`` restricts the count to the given row-group triples (labels
    from the base matrix); by default every triple of the selected rows is
    used, which gives the full census of a column-weight-``omega`` code.
    """
    if isinstance(target, ABMatrixSpec):
        target = SCCodeSpec(target, SpreadingMatrix.zeros(target.omega, target.p, 0), 1)
    if isinstance(target, SCCodeSpec):
        groups = target.base.row_groups
        pos = _positions(groups, triples)
        ev = AlcEvaluator(target.p, target.m, groups, pos)
        mu = ev.spans(target.spreading.entries)
        total = sum((target.L - e + 1) * int(x) for e, x in enumerate(mu, start=1))
        return CycleReport(total, tuple(int(x) for x in mu), target.p, convention, target.L)
    if isinstance(target, CirculantGrid):
        qs, present = _infer_multipliers(target)
        p = target.block_size
        pos = _positions(qs, triples)
        total = 0
        template = RegionDescriptor(((0, 0), (0, 1), (0, 2)), 1, 1)
        for t in pos:
            groups = [qs[i] for i in t]
            masks = np.where(present[list(t)], 0, -1)
            region = bind_region(template, groups, np.zeros((3, p), np.int64), p).with_masks(masks)
            total += count_region(region, p)
        return CycleReport(total, (total,), p, convention, 1)
    raise TypeError(f"cannot count cycles of {type(target).__name__}")


def _positions(groups: Sequence[int], triples: Optional[Sequence[Sequence[int]]]) -> list[tuple[int, int, int]]:
    if len(groups) < 3:
        return []
    if triples is None:
        return all_triples(len(groups))
    where = {g: i for i, g in enumerate(groups)}
    out = []
    for t in triples:
        try:
            out.append(tuple(sorted(where[g] for g in t)))
        except KeyError as exc:
            raise ValueError(f"row group {exc.args[0]} not selected") from None
    return out
