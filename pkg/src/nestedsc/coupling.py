"""Edge spreading, terminated SC assembly and the SC code descriptor file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .abmatrix import ABMatrixSpec
from .gf2 import ZERO, BinaryMatrix, CirculantGrid, expand


def _ro(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype, ndmin=2)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpreadingMatrix:
    """Memory assignment ``g in {0..m}`` for every circulant of a base grid.

    ``fixed`` marks entries decided by an optimisation step; unfixed entries
    are placeholders (normally 0).
    """

    entries: np.ndarray
    m: int
    fixed: Optional[np.ndarray] = None

    def __post_init__(self):
        e = _ro(self.entries, np.int64)
        if self.m < 0:
            raise ValueError("memory must be non-negative")
        if e.size and (e.min() < 0 or e.max() > self.m):
            raise ValueError(f"spreading entries must lie in 0..{self.m}")
        f = np.ones(e.shape, bool) if self.fixed is None else np.array(self.fixed, bool, ndmin=2)
        if f.shape != e.shape:
            raise ValueError("fixed mask shape mismatch")
        f.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "fixed", f)

    @classmethod
    def zeros(cls, rows: int, cols: int, m: int) -> "SpreadingMatrix":
        return cls(np.zeros((rows, cols), np.int64), m, np.zeros((rows, cols), bool))

    @classmethod
    def random(cls, rows: int, cols: int, m: int, rng: np.random.Generator) -> "SpreadingMatrix":
        return cls(rng.integers(0, m + 1, size=(rows, cols)), m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def fully_fixed(self) -> bool:
        return bool(self.fixed.all())

    def rows_subset(self, idx: Sequence[int]) -> "SpreadingMatrix":
        idx = list(idx)
        return SpreadingMatrix(self.entries[idx], self.m, self.fixed[idx])

    def __eq__(self, other):
        if not isinstance(other, SpreadingMatrix):
            return NotImplemented
        return (
            self.m == other.m
            and np.array_equal(self.entries, other.entries)
            and np.array_equal(self.fixed, other.fixed)
        )

    def __repr__(self):
        return f"SpreadingMatrix(m={self.m}, entries={self.entries.tolist()})"


@dataclass(frozen=True, eq=False)
class LiftAssignment:
    """Circulant shifts of a terminal lift.

    ``shifts[q]`` has shape ``(m+1, p, p)``: the shift of the one in row group
    ``q`` of column ``(v, j, k)`` for the first ``m+1`` column blocks. Column
    block ``v`` reuses the shifts of block ``v mod (m+1)``.
    """

    J: int
    shifts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.J < 1:
            raise ValueError("lift factor must be >= 1")
        sh = {}
        for q, a in self.shifts.items():
            a = np.array(a, dtype=np.int64)
            if a.ndim != 3 or a.shape[1] != a.shape[2]:
                raise ValueError("shift table must have shape (m+1, p, p)")
            if a.size and (a.min() < 0 or a.max() >= self.J):
                raise ValueError("shift outside 0..J-1")
            a.setflags(write=False)
            sh[int(q)] = a
        object.__setattr__(self, "shifts", sh)

    def __eq__(self, other):
        if not isinstance(other, LiftAssignment):
            return NotImplemented
        return (
            self.J == other.J
            and self.shifts.keys() == other.shifts.keys()
            and all(np.array_equal(self.shifts[q], other.shifts[q]) for q in self.shifts)
        )

    def to_json_obj(self) -> dict:
        return {"J": self.J, "shifts": {str(q): a.tolist() for q, a in sorted(self.shifts.items())}}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LiftAssignment":
        return cls(int(obj["J"]), {int(q): np.array(a) for q, a in obj["shifts"].items()})


def split_components(h: CirculantGrid, b: SpreadingMatrix) -> list[CirculantGrid]:
    """Components ``H_0..H_m``: ``H_g`` keeps cell ``(i, j)`` of ``h`` iff ``b[i, j] == g``."""
    if b.shape != h.cells.shape:
        raise ValueError(f"spreading shape {b.shape} does not match grid {h.cells.shape}")
    return [
        CirculantGrid(np.where(b.entries == g, h.cells, ZERO), h.block_size)
        for g in range(b.m + 1)
    ]


def _assemble(components: Sequence[CirculantGrid], L: int) -> CirculantGrid:
    m = len(components) - 1
    R, C = components[0].cells.shape
    cells = np.full(((L + m) * R, L * C), ZERO, dtype=np.int64)
    for v in range(L):
        for g, comp in enumerate(components):
            y = v + g
            cells[y * R:(y + 1) * R, v * C:(v + 1) * C] = comp.cells
    return CirculantGrid(cells, components[0].block_size)


def assemble_sc(components: Sequence[CirculantGrid], L: int) -> CirculantGrid:
    """Terminated block-banded SC grid with ``L`` column blocks.

    ``L >= m + 1`` is accepted: a window of exactly ``m + 1`` blocks is what the
    cycle optimisation works on.
    """
    if not components:
        raise ValueError("need at least one component")
    shapes = {c.cells.shape for c in components}
    if len(shapes) != 1 or len({c.block_size for c in components}) != 1:
        raise ValueError("components must share shape and block size")
    m = len(components) - 1
    if L < m + 1:
        raise ValueError(f"coupling length L={L} too small for memory m={m}")
    return _assemble(components, L)


def sc_index(y: int, q: int, s: int, v: int, j: int, k: int, p: int, gamma: int) -> tuple[int, int]:
    """``(y, q, s; v, j, k) -> (r, c)``; ``q`` is the position of the row group inside a row block."""
    if min(y, q, s, v, j, k) < 0 or q >= gamma or s >= p or j >= p or k >= p:
        raise ValueError("coordinate out of range")
    return (y * gamma + q) * p + s, (v * p + j) * p + k


def sc_coords(r: int, c: int, p: int, gamma: int) -> tuple[int, int, int, int, int, int]:
    if r < 0 or c < 0:
        raise ValueError("coordinate out of range")
    rg, s = divmod(r, p)
    y, q = divmod(rg, gamma)
    cg, k = divmod(c, p)
    v, j = divmod(cg, p)
    return y, q, s, v, j, k


@dataclass(frozen=True, eq=False)
class SCCodeSpec:
    """Everything needed to rebuild one nested SC code."""

    base: ABMatrixSpec
    spreading: SpreadingMatrix
    L: int
    lift: Optional[LiftAssignment] = None

    def __post_init__(self):
        if self.spreading.shape != (self.base.omega, self.base.p):
            raise ValueError("spreading matrix does not match the selected row groups")
        if self.L < self.m + 1:
            raise ValueError(f"coupling length L={self.L} too small for memory m={self.m}")
        if self.lift is not None:
            want = (self.m + 1, self.base.p, self.base.p)
            if set(self.lift.shifts) != set(self.base.row_groups) or any(
                a.shape != want for a in self.lift.shifts.values()
            ):
                raise ValueError("lift shifts do not cover the code support")

    @property
    def m(self) -> int:
        return self.spreading.m

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def nu(self) -> int:
        """Constraint length ``(m+1) p^2`` (columns spanned by one coupled position)."""
        return (self.m + 1) * self.p ** 2

    @property
    def nu_lifted(self) -> int:
        return self.nu * (self.lift.J if self.lift else 1)

    def with_L(self, L: int) -> "SCCodeSpec":
        return SCCodeSpec(self.base, self.spreading, L, self.lift)

    def with_lift(self, lift: Optional[LiftAssignment]) -> "SCCodeSpec":
        return SCCodeSpec(self.base, self.spreading, self.L, lift)

    def components(self) -> list[CirculantGrid]:
        return split_components(self.base.grid(), self.spreading)

    def grid(self) -> CirculantGrid:
        return assemble_sc(self.components(), self.L)

    def matrix(self) -> BinaryMatrix:
        """Expanded parity-check matrix, lifted if a lift is attached."""
        if self.lift is None:
            return expand(self.grid())
        from .lifting import lift_sc

        return expand(lift_sc(self))

    # -- persistence ---------------------------------------------------
    def to_json_obj(self) -> dict:
        obj = {
            "gamma": self.base.gamma,
            "p": self.base.p,
            "row_groups": list(self.base.row_groups),
            "m": self.m,
            "L": self.L,
            "B": self.spreading.entries.tolist(),
            "fixed": self.spreading.fixed.astype(int).tolist(),
            "lift": self.lift.to_json_obj() if self.lift else None,
        }
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SCCodeSpec":
        base = ABMatrixSpec(int(obj["gamma"]), int(obj["p"]), tuple(obj["row_groups"]))
        fixed = obj.get("fixed")
        spreading = SpreadingMatrix(
            np.array(obj["B"]), int(obj["m"]), None if fixed is None else np.array(fixed, bool)
        )
        lift = obj.get("lift")
        return cls(base, spreading, int(obj["L"]), LiftAssignment.from_json_obj(lift) if lift else None)

    @classmethod
    def from_json(cls, text: str) -> "SCCodeSpec":
        return cls.from_json_obj(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, SCCodeSpec):
            return NotImplemented
        return (
            self.base == other.base
            and self.spreading == other.spreading
            and self.L == other.L
            and self.lift == other.lift
        )
