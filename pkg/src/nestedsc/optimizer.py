"""Guided search over spreading-matrix entries and the two nested optimisation pipelines.

The search fixes one entry at a time (forward step), choosing the memory
value with the fewest 6-cycles as counted by line counting, ties broken at
random with the other tied values saved. When no value of the next entry
avoids closing a new cycle, the search undoes the most recent choices until
one with a saved tied candidate remains and tries that candidate instead
(back-tracking).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .abmatrix import ABMatrixSpec, weight3_cover
from .alc import AlcEvaluator, _positions, all_triples
from .coupling import SCCodeSpec, SpreadingMatrix

GLOBAL_ROWS = (0, 1, 2)
OBJECTIVES = ("cover", "full")


@dataclass
class SearchState:
    """Mutable state of one guided search."""

    b: np.ndarray
    fixed: np.ndarray
    rho: list = field(default_factory=list)
    stack: list = field(default_factory=list)  # (entry, saved tied candidates)
    iteration: int = 0
    lmax: int = 10_000
    seed: int = 0


@dataclass(frozen=True)
class SearchResult:
    spreading: SpreadingMatrix
    rho: int
    iterations: int
    trace: tuple[int, ...]
    reason: str


def guided_search(
    base: ABMatrixSpec,
    b: SpreadingMatrix,
    lmax: int = 10_000,
    seed: int = 0,
    triples: Optional[Sequence[Sequence[int]]] = None,
    order: str = "col",
) -> SearchResult:
    """Fix every unfixed entry of ``b`` so as to minimise the 6-cycle count.

    ``triples`` (row-group labels) selects which weight-3 sub-matrices are
    counted; by default all triples of ``base.row_groups``. The objective
    ``rho`` is ``sum_e mu_e``, the per-position cycle count behind the
    asymptotic average. While searching, circulants of unfixed entries are
    left out of the count, so ``rho`` only grows when a fixed choice closes a
    cycle. ``order`` is the entry visit order, ``"col"`` (default) or ``"row"``
    major.
    """
    if b.shape != (base.omega, base.p):
        raise ValueError(f"spreading shape {b.shape} does not match ({base.omega}, {base.p})")
    ev = AlcEvaluator(base.p, b.m, base.row_groups, _positions(base.row_groups, triples))

    def objective(entries: np.ndarray, present: np.ndarray) -> int:
        return int(ev.spans(entries, present=present).sum())

    return _search(objective, b, lmax, seed, order)


def _visit_order(free: np.ndarray, kind: str) -> list[tuple[int, int]]:
    if kind == "row":
        return [tuple(int(x) for x in ix) for ix in np.argwhere(free)]
    if kind == "col":
        return [(int(i), int(j)) for j, i in np.argwhere(free.T)]
    raise ValueError(f"unknown visit order {kind!r}")


def _search(objective, b: SpreadingMatrix, lmax: int, seed: int, order_kind: str = "col") -> SearchResult:
    rng = np.random.default_rng(seed)
    cur = np.where(b.fixed, b.entries, 0).astype(np.int64)
    present = b.fixed.copy()
    order = _visit_order(~b.fixed, order_kind)
    st = SearchState(cur, present, lmax=lmax, seed=seed)
    values = np.arange(b.m + 1)
    rho = objective(cur, present)
    st.rho.append(rho)
    rho_at = [rho]  # rho after each stack depth
    deepest = (0, rho, cur.copy())

    def finish(entries, why):
        full = np.ones(b.shape, bool)
        out = SpreadingMatrix(entries, b.m, full)
        return SearchResult(out, objective(entries, full), st.iteration, tuple(st.rho), why)

    def counts_at(ix):
        present[ix] = True
        out = []
        for v in values:
            cur[ix] = v
            out.append(objective(cur, present))
        return np.array(out)

    reason = "complete"
    while True:
        depth = len(st.stack)
        if depth == len(order):
            return finish(cur, "zero" if rho == 0 else "complete")
        if st.iteration >= lmax:
            reason = "budget"
            break
        ix = order[depth]
        counts = counts_at(ix)
        st.iteration += 1
        best = int(counts.min())
        if best <= rho:
            ties = values[counts == best]
            pick = int(rng.choice(ties))
            cur[ix] = pick
            st.stack.append((ix, [int(v) for v in ties if v != pick]))
            rho = best
            rho_at.append(rho)
            st.rho.append(rho)
            if depth + 1 > deepest[0] or (depth + 1 == deepest[0] and rho < deepest[1]):
                deepest = (depth + 1, rho, cur.copy())
            continue
        # every value closes a new cycle: back-track to the latest saved tie
        present[ix] = False
        cur[ix] = 0
        while st.stack and not st.stack[-1][1]:
            jx, _ = st.stack.pop()
            rho_at.pop()
            present[jx] = False
            cur[jx] = 0
        if not st.stack:
            reason = "exhausted"
            break
        jx, saved = st.stack[-1]
        cur[jx] = saved.pop(int(rng.integers(len(saved))))
        rho = rho_at[-1]
        st.rho.append(rho)
    # no cycle-free completion found: finish the deepest partial state greedily
    depth, rho, cur = deepest[0], deepest[1], deepest[2].copy()
    present[:] = b.fixed
    for ix in order[:depth]:
        present[ix] = True
    for ix in order[depth:]:
        counts = counts_at(ix)
        cur[ix] = int(values[counts == counts.min()][0])
    return finish(cur, reason)


# ----------------------------------------------------------------------------
# nested pipelines


@dataclass(frozen=True)
class NestedPlan:
    """Sub-codes (row-group sets), optimisation order and search settings.

    ``subcodes[i]`` holds the row groups of sub-code ``i + 1``; ``order`` is a
    permutation of ``1..M``. ``objective`` selects what each constrained step
    minimises: ``"full"`` (default) counts every triple of the sub-code that
    involves a row being determined, ``"cover"`` only the weight-3 cover
    triples.
    """

    gamma: int
    p: int
    m: int
    subcodes: tuple[tuple[int, ...], ...] = ()
    order: tuple[int, ...] = ()
    method: int = 1
    lmax: int = 10_000
    seed: int = 0
    objective: str = "full"
    L: int = 0

    def __post_init__(self):
        object.__setattr__(self, "subcodes", tuple(tuple(sorted(s)) for s in self.subcodes))
        order = tuple(self.order) if self.order else tuple(range(1, len(self.subcodes) + 1))
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(1, len(self.subcodes) + 1)):
            raise ValueError("order must be a permutation of 1..M")
        if self.method not in (1, 2):
            raise ValueError("method must be 1 or 2")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        for s in self.subcodes:
            if not set(GLOBAL_ROWS) <= set(s):
                raise ValueError(f"sub-code {s} does not contain the global rows {GLOBAL_ROWS}")
            if s[-1] >= self.gamma:
                raise ValueError(f"sub-code {s} uses a row group beyond gamma={self.gamma}")
        if self.method == 2 and not self.subcodes:
            raise ValueError("method 2 needs at least one sub-code")

    @property
    def coupling_length(self) -> int:
        return self.L or self.m + 1


@dataclass(frozen=True)
class PipelineResult:
    """Optimised specs: ``codes[0]`` is the global code, then sub-codes 1..M."""

    codes: tuple[SCCodeSpec, ...]
    rows: dict
    steps: tuple[tuple[tuple[int, ...], SearchResult], ...]

    @property
    def global_code(self) -> SCCodeSpec:
        return self.codes[0]


def _optimize_triple(plan: NestedPlan, rows: dict, triple: Sequence[int], code_rows: Sequence[int], seed: int):
    """Run one constrained search on ``triple``; newly fixed rows are written into ``rows``."""
    known = sorted(set(rows) | set(triple))
    if plan.objective == "full":
        scope = sorted(set(known) & set(code_rows))
        fresh = set(triple) - set(rows)
        counted = [tuple(scope[i] for i in t) for t in all_triples(len(scope))]
        counted = [t for t in counted if set(t) & fresh]
        labels = scope
    else:
        labels = sorted(triple)
        counted = [tuple(labels)]
    base = ABMatrixSpec(plan.gamma, plan.p, tuple(labels))
    entries = np.zeros((len(labels), plan.p), np.int64)
    fixed = np.zeros((len(labels), plan.p), bool)
    for i, q in enumerate(labels):
        if q in rows:
            entries[i] = rows[q]
            fixed[i] = True
    b = SpreadingMatrix(entries, plan.m, fixed)
    res = guided_search(base, b, plan.lmax, seed, counted)
    for i, q in enumerate(labels):
        if q not in rows:
            rows[q] = res.spreading.entries[i].copy()
    return res


def _finish(plan: NestedPlan, rows: dict, steps) -> PipelineResult:
    codes = []
    for s in (GLOBAL_ROWS,) + plan.subcodes:
        base = ABMatrixSpec(plan.gamma, plan.p, s)
        b = SpreadingMatrix(np.array([rows[q] for q in s]), plan.m)
        codes.append(SCCodeSpec(base, b, plan.coupling_length))
    return PipelineResult(tuple(codes), {q: r.copy() for q, r in rows.items()}, tuple(steps))


def _step_seed(plan: NestedPlan, steps: list) -> int:
    return int(np.random.SeedSequence([plan.seed, len(steps)]).generate_state(1)[0])


def _optimize_code(plan: NestedPlan, rows: dict, code_rows: Sequence[int], steps: list) -> None:
    """Determine the missing rows of one code triple by triple along its weight-3 cover."""
    for triple in weight3_cover(code_rows):
        if set(triple) <= set(rows):
            continue
        res = _optimize_triple(plan, rows, triple, code_rows, _step_seed(plan, steps))
        steps.append((tuple(triple), res))


def _optimize_joint(plan: NestedPlan, rows: dict, code_rows: Sequence[int], steps: list) -> None:
    """Determine every missing row of one code in a single search over all its triples."""
    labels = tuple(sorted(code_rows))
    if set(labels) <= set(rows):
        return
    if plan.objective == "full":
        counted = [tuple(labels[i] for i in t) for t in all_triples(len(labels))]
    else:
        counted = weight3_cover(labels)
    base = ABMatrixSpec(plan.gamma, plan.p, labels)
    entries = np.array([rows.get(q, np.zeros(plan.p, np.int64)) for q in labels])
    fixed = np.array([np.full(plan.p, q in rows) for q in labels])
    res = guided_search(base, SpreadingMatrix(entries, plan.m, fixed), plan.lmax, _step_seed(plan, steps), counted)
    for i, q in enumerate(labels):
        rows.setdefault(q, res.spreading.entries[i].copy())
    steps.append((labels, res))


def run_method1(plan: NestedPlan) -> PipelineResult:
    """Global rows first, then each sub-code's remaining rows in ``plan.order``."""
    if plan.method != 1:
        raise ValueError("plan is not a method-1 plan")
    rows: dict = {}
    steps: list = []
    _optimize_code(plan, rows, GLOBAL_ROWS, steps)
    for t in plan.order:
        _optimize_code(plan, rows, plan.subcodes[t - 1], steps)
    return _finish(plan, rows, steps)


def run_method2(plan: NestedPlan) -> PipelineResult:
    """Sub-code ``t1`` first in one joint search (the global rows come with it), then the rest."""
    if plan.method != 2:
        raise ValueError("plan is not a method-2 plan")
    rows: dict = {}
    steps: list = []
    first, *rest = plan.order
    _optimize_joint(plan, rows, plan.subcodes[first - 1], steps)
    for t in rest:
        _optimize_code(plan, rows, plan.subcodes[t - 1], steps)
    return _finish(plan, rows, steps)


def run_plan(plan: NestedPlan) -> PipelineResult:
    return run_method1(plan) if plan.method == 1 else run_method2(plan)
