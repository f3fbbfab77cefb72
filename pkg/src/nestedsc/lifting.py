"""Terminal circulant lift of SC (and BC) matrices and the search for cycle-breaking shifts.

Every one of the expanded ``p``-level matrix becomes a ``J x J`` circulant
``Shift(s)``; zeros become ``J x J`` zero blocks. Shifts are chosen for the
first ``m+1`` column blocks and reused periodically.

A 6-cycle of the base graph lifts to ``J`` 6-cycles when its alternating
shift sum vanishes mod ``J`` and to none otherwise, and since the base graph
has girth 6 these are all the 6-cycles of the lift. The search works on these
sums; the final residual is re-counted by brute force on the lifted matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .abmatrix import ABMatrixSpec
from .census import count_6cycles, list_6cycles
from .coupling import LiftAssignment, SCCodeSpec, SpreadingMatrix
from .gf2 import ZERO, BinaryMatrix, CirculantGrid, expand

__all__ = [
    "LiftAssignment",
    "LiftResult",
    "bc_spec",
    "lift",
    "lift_nested_family",
    "lift_sc",
    "lifted_matrix",
    "residual_window",
    "search_lift",
    "zero_lift",
]


def zero_lift(spec: SCCodeSpec, J: int) -> LiftAssignment:
    shape = (spec.m + 1, spec.p, spec.p)
    return LiftAssignment(J, {q: np.zeros(shape, np.int64) for q in spec.base.row_groups})


def lift(base: BinaryMatrix, spec: SCCodeSpec, assign: LiftAssignment) -> CirculantGrid:
    """Lift the expanded SC matrix ``base`` (of ``spec`` at any ``L``) with ``assign``.

    The result is a grid of ``J``-circulants over the ``p``-level matrix, whose
    expansion has shape ``(rows*J, cols*J)``.
    """
    p, omega, m = spec.p, spec.base.omega, spec.m
    labels = spec.base.row_groups
    cells = np.full(base.shape, ZERO, dtype=np.int64)
    r, c = base.r, base.c
    _, q_pos, _, v, j, k = _coords(r, c, p, omega)
    for i, q in enumerate(labels):
        sel = q_pos == i
        if not sel.any():
            continue
        table = assign.shifts.get(q)
        if table is None:
            raise ValueError(f"missing shifts for row group {q}")
        cells[r[sel], c[sel]] = table[v[sel] % (m + 1), j[sel], k[sel]]
    return CirculantGrid(cells, assign.J)


def _coords(r: np.ndarray, c: np.ndarray, p: int, omega: int):
    rg, s = np.divmod(r, p)
    y, q = np.divmod(rg, omega)
    cg, k = np.divmod(c, p)
    v, j = np.divmod(cg, p)
    return y, q, s, v, j, k


def lift_sc(spec: SCCodeSpec) -> CirculantGrid:
    """Lifted grid of ``spec`` at its own ``L`` (``spec.lift`` must be set)."""
    if spec.lift is None:
        raise ValueError("spec carries no lift")
    return lift(expand(spec.grid()), spec, spec.lift)


def lifted_matrix(spec: SCCodeSpec, assign: Optional[LiftAssignment] = None) -> BinaryMatrix:
    assign = assign if assign is not None else spec.lift
    if assign is None:
        return expand(spec.grid())
    return expand(lift(expand(spec.grid()), spec, assign))


def residual_window(spec: SCCodeSpec) -> int:
    """Coupling length on which residual cycles are counted.

    ``2(m+1)`` blocks hold every cycle at every phase of the periodic lift,
    including those crossing the seam between periods. Uncoupled codes
    (``m = 0``) have independent blocks, so one block suffices.
    """
    return 2 * (spec.m + 1) if spec.m > 0 else 1


def bc_spec(base: ABMatrixSpec) -> SCCodeSpec:
    """The uncoupled code ``H(omega, p)`` as a memory-0, single-block spec."""
    return SCCodeSpec(base, SpreadingMatrix(np.zeros((base.omega, base.p), np.int64), 0), 1)


# ----------------------------------------------------------------------------
# search


class _VoltageProblem:
    """Base 6-cycles of the residual window as signed shift-variable sums."""

    def __init__(self, spec: SCCodeSpec):
        self.spec = spec
        p, m, omega = spec.p, spec.m, spec.base.omega
        self.window = spec.with_L(residual_window(spec)).with_lift(None)
        h = expand(self.window.grid())
        self.shape = (omega, m + 1, p, p)
        cyc = list_6cycles(h)  # v1 c1 v2 c2 v3 c3
        vs = cyc[:, 0::2]
        cs = cyc[:, 1::2]
        # edges in walk order: (c1,v1)+ (c1,v2)- (c2,v2)+ (c2,v3)- (c3,v3)+ (c3,v1)-
        er = np.stack([cs[:, 0], cs[:, 0], cs[:, 1], cs[:, 1], cs[:, 2], cs[:, 2]], axis=1)
        ec = np.stack([vs[:, 0], vs[:, 1], vs[:, 1], vs[:, 2], vs[:, 2], vs[:, 0]], axis=1)
        _, q, _, v, j, k = _coords(er, ec, p, omega)
        self.var = np.ravel_multi_index((q, v % (m + 1), j, k), self.shape) if len(cyc) else np.zeros((0, 6), np.int64)
        self.sign = np.tile(np.array([1, -1, 1, -1, 1, -1]), (len(cyc), 1))
        self.nvars = int(np.prod(self.shape))
        self.base_matrix = h
        members: list[list[int]] = [[] for _ in range(self.nvars)]
        for n, row in enumerate(self.var.tolist()):
            for x in set(row):
                members[x].append(n)
        self.members = [np.array(x, dtype=np.int64) for x in members]
        self.used = np.array([len(x) > 0 for x in members])

    @property
    def num_cycles(self) -> int:
        return len(self.var)

    def sums(self, x: np.ndarray, J: int, rows=None) -> np.ndarray:
        if rows is None:
            return (self.sign * x[self.var]).sum(axis=1) % J
        return (self.sign[rows] * x[self.var[rows]]).sum(axis=1) % J

    def closed(self, x: np.ndarray, J: int) -> int:
        """Number of base cycles whose lift closes (each gives ``J`` lifted cycles)."""
        if not self.num_cycles:
            return 0
        return int((self.sums(x, J) == 0).sum())

    def to_assignment(self, x: np.ndarray, J: int) -> LiftAssignment:
        t = x.reshape(self.shape)
        return LiftAssignment(J, {q: t[i] for i, q in enumerate(self.spec.base.row_groups)})

    def from_assignment(self, a: LiftAssignment) -> np.ndarray:
        return np.stack([np.asarray(a.shifts[q]) for q in self.spec.base.row_groups]).ravel().astype(np.int64)


@dataclass(frozen=True)
class LiftResult:
    assignment: LiftAssignment
    residual: int  # 6-cycles of the lifted residual window, counted by brute force
    closed_base_cycles: int
    evaluations: int
    reason: str


def _greedy(prob: _VoltageProblem, x: np.ndarray, free: np.ndarray, J: int, rng, budget: int):
    """Coordinate descent on free variables; returns (x, closed count, evaluations used)."""
    used = 0
    closed = prob.closed(x, J)
    improved = True
    cand = np.flatnonzero(free & prob.used)
    while improved and closed > 0 and used < budget:
        improved = False
        for u in rng.permutation(cand):
            rows = prob.members[u]
            old = x[u]
            base_cnt = int((prob.sums(x, J, rows) == 0).sum())
            best_v, best_cnt = old, base_cnt
            for val in range(J):
                if val == old:
                    continue
                x[u] = val
                cnt = int((prob.sums(x, J, rows) == 0).sum())
                used += 1
                if cnt < best_cnt:
                    best_v, best_cnt = val, cnt
            x[u] = best_v
            if best_cnt < base_cnt:
                closed -= base_cnt - best_cnt
                improved = True
                if closed == 0 or used >= budget:
                    break
    return x, closed, used


def _search(prob: _VoltageProblem, J: int, budget: int, seed: int, x0: np.ndarray, free: np.ndarray):
    rng = np.random.default_rng(seed)
    best = x0.copy()
    best_closed = prob.closed(best, J)
    used = 0
    reason = "budget"
    nfree = int((free & prob.used).sum())
    if best_closed == 0:
        return best, 0, used, "zero"
    if J ** nfree <= budget:
        idx = np.flatnonzero(free & prob.used)
        x = x0.copy()
        for combo in itertools.product(range(J), repeat=nfree):
            x[idx] = (x0[idx] + np.asarray(combo, np.int64)) % J
            used += 1
            cnt = prob.closed(x, J)
            if cnt < best_closed:
                best, best_closed = x.copy(), cnt
                if cnt == 0:
                    return best, 0, used, "zero"
        return best, best_closed, used, "exhaustive"
    first = True
    while used < budget:
        x = x0.copy()
        if not first:
            x[free] = rng.integers(0, J, size=int(free.sum()))
        first = False
        x, cnt, n = _greedy(prob, x, free, J, rng, budget - used)
        used += max(n, 1)
        if cnt < best_closed:
            best, best_closed = x.copy(), cnt
        if best_closed == 0:
            reason = "zero"
            break
    return best, best_closed, used, reason


def search_lift(
    spec: SCCodeSpec,
    J: int,
    budget: int = 100_000,
    seed: int = 0,
    fixed: Optional[LiftAssignment] = None,
    fixed_rows: Sequence[int] = (),
) -> LiftResult:
    """Shifts for the first ``m+1`` column blocks minimising residual 6-cycles.

    The search starts from uniformly random shifts, then runs random
    restarts with greedy per-cell improvement (exhaustive when
    ``J ** support`` fits in ``budget``). ``budget`` counts candidate shift
    evaluations. Rows listed in ``fixed_rows`` keep the shifts of ``fixed``.
    """
    if J < 1:
        raise ValueError("lift factor must be >= 1")
    if not spec.spreading.fully_fixed:
        raise ValueError("spreading matrix has unfixed entries")
    prob = _VoltageProblem(spec)
    x0 = np.zeros(prob.nvars, np.int64)
    free = np.ones(prob.shape, bool)
    if fixed is not None:
        start = {q: np.zeros(prob.shape[1:], np.int64) for q in spec.base.row_groups}
        for q in fixed_rows:
            start[q] = np.asarray(fixed.shifts[q])
            free[spec.base.row_groups.index(q)] = False
        x0 = prob.from_assignment(LiftAssignment(J, start))
    free = free.ravel()
    # random circulants everywhere: an all-zero lift is J disconnected copies
    x0[free] = np.random.default_rng([seed, 1]).integers(0, J, size=int(free.sum()))
    if J == 1:
        x, closed, used, reason = x0, prob.closed(x0, 1), 0, "trivial"
    else:
        x, closed, used, reason = _search(prob, J, budget, seed, x0, free)
    assign = prob.to_assignment(x, J)
    residual = count_6cycles(expand(lift(prob.base_matrix, prob.window, assign))).total_cycles
    if residual != J * closed:
        raise AssertionError(f"lifted census {residual} disagrees with shift sums {J * closed}")
    return LiftResult(assign, residual, closed, used, reason)


def lift_nested_family(
    specs: Sequence[SCCodeSpec], J: int, budget: int = 100_000, seed: int = 0
) -> list[LiftResult]:
    """Lift a nested family so that shared row groups carry identical shifts.

    Specs are processed in order; each one searches only the row groups not
    lifted by an earlier spec.
    """
    if not specs:
        return []
    p, m = specs[0].p, specs[0].m
    rows: dict[int, np.ndarray] = {}
    spread: dict[int, np.ndarray] = {}
    for s in specs:
        if s.p != p or s.m != m:
            raise ValueError("inconsistent shared support: specs differ in p or m")
        for i, q in enumerate(s.base.row_groups):
            row = s.spreading.entries[i]
            if q in spread and not np.array_equal(spread[q], row):
                raise ValueError(f"inconsistent shared support in row group {q}")
            spread[q] = row
    out = []
    for n, s in enumerate(specs):
        done = [q for q in s.base.row_groups if q in rows]
        sub_seed = int(np.random.SeedSequence([seed, n]).generate_state(1)[0])
        res = search_lift(s, J, budget, sub_seed, LiftAssignment(J, {q: rows[q] for q in done}), done)
        for q in s.base.row_groups:
            rows.setdefault(q, np.asarray(res.assignment.shifts[q]))
        out.append(res)
    return out


def bc_lift_dims(base: ABMatrixSpec, J: int, m: int) -> tuple[int, int]:
    """Shape of ``H(omega, p)`` lifted by ``J (m+1)``: its length equals the SC constraint length."""
    f = J * (m + 1)
    return base.omega * base.p * f, base.p * base.p * f
