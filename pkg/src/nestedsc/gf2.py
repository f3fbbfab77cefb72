"""Binary matrices, circulant block grids and the alist exchange format.

Circulant convention used everywhere in the package: the ``p x p`` block
``Shift(z)`` has its ones at ``(s, k)`` with ``s = (z + k) mod p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

ZERO = -1  # cell value of an all-zero block in a CirculantGrid


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """Sparse matrix over GF(2) stored as sorted (row, col) coordinate arrays."""

    rows: int
    cols: int
    r: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=np.int64).ravel()
        c = np.asarray(self.c, dtype=np.int64).ravel()
        if r.shape != c.shape:
            raise ValueError("row/col coordinate arrays differ in length")
        if r.size:
            if r.min() < 0 or r.max() >= self.rows or c.min() < 0 or c.max() >= self.cols:
                raise ValueError("entry out of range")
        order = np.lexsort((c, r))
        r, c = r[order], c[order]
        if r.size > 1:
            dup = (np.diff(r) == 0) & (np.diff(c) == 0)
            if dup.any():
                raise ValueError("duplicate entry")
        object.__setattr__(self, "r", _frozen(r))
        object.__setattr__(self, "c", _frozen(c))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[tuple[int, int]]):
        ent = list(entries)
        if not ent:
            return cls(rows, cols, np.zeros(0, np.int64), np.zeros(0, np.int64))
        r, c = zip(*ent)
        return cls(rows, cols, np.array(r), np.array(c))

    @classmethod
    def from_dense(cls, a) -> "BinaryMatrix":
        a = np.asarray(a) % 2
        r, c = np.nonzero(a)
        return cls(a.shape[0], a.shape[1], r, c)

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        idx = np.arange(n)
        return cls(n, n, idx, idx)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return int(self.r.size)

    @property
    def entries(self) -> frozenset[tuple[int, int]]:
        return frozenset(zip(self.r.tolist(), self.c.tolist()))

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.uint8)
        a[self.r, self.c] = 1
        return a

    def row_weights(self) -> np.ndarray:
        return np.bincount(self.r, minlength=self.rows)

    def col_weights(self) -> np.ndarray:
        return np.bincount(self.c, minlength=self.cols)

    def syndrome(self, x) -> np.ndarray:
        """``H x`` over GF(2) for a 0/1 vector ``x``."""
        x = np.asarray(x, dtype=np.int64)
        return (np.bincount(self.r, weights=x[self.c], minlength=self.rows).astype(np.int64)) % 2

    def __eq__(self, other):
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.r, other.r)
            and np.array_equal(self.c, other.c)
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.r.tobytes(), self.c.tobytes()))


@dataclass(frozen=True, eq=False)
class CirculantGrid:
    """Block matrix of ``block_size``-square circulants.

    ``cells[i, j]`` is a shift exponent in ``[0, block_size)`` or ``ZERO``.
    """

    cells: np.ndarray
    block_size: int

    def __post_init__(self):
        if self.block_size < 1:
            raise ValueError("block size must be positive")
        cells = np.array(self.cells, dtype=np.int64, ndmin=2)
        if cells.ndim != 2:
            raise ValueError("cells must be a 2-d grid")
        if (cells < ZERO).any():
            raise ValueError("negative shift exponent")
        nz = cells != ZERO
        cells = np.where(nz, cells % self.block_size, ZERO)
        object.__setattr__(self, "cells", _frozen(cells))

    @property
    def block_rows(self) -> int:
        return self.cells.shape[0]

    @property
    def block_cols(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.block_rows * self.block_size, self.block_cols * self.block_size

    def is_zero(self, i: int, j: int) -> bool:
        return self.cells[i, j] == ZERO

    def __eq__(self, other):
        if not isinstance(other, CirculantGrid):
            return NotImplemented
        return self.block_size == other.block_size and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.block_size, self.cells.shape, self.cells.tobytes()))

    def __repr__(self):
        return f"CirculantGrid({self.block_rows}x{self.block_cols}, block_size={self.block_size})"


def expand(grid: CirculantGrid) -> BinaryMatrix:
    """Expand every ``Shift(z)`` cell into its ``p x p`` permutation block."""
    p = grid.block_size
    bi, bj = np.nonzero(grid.cells != ZERO)
    z = grid.cells[bi, bj]
    k = np.arange(p)
    rows = (bi[:, None] * p + (z[:, None] + k[None, :]) % p).ravel()
    cols = (bj[:, None] * p + k[None, :]).ravel()
    return BinaryMatrix(grid.shape[0], grid.shape[1], rows, cols)


def rank_gf2(m: BinaryMatrix) -> int:
    """GF(2) rank by elimination on bit-packed rows."""
    packed = [0] * m.rows
    for r, c in zip(m.r.tolist(), m.c.tolist()):
        packed[r] |= 1 << c
    pivots: dict[int, int] = {}
    for row in packed:
        while row:
            lead = row.bit_length() - 1
            piv = pivots.get(lead)
            if piv is None:
                pivots[lead] = row
                break
            row ^= piv
    return len(pivots)


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite adjacency: neighbour lists per check node and per variable node."""

    check_nbrs: tuple[tuple[int, ...], ...]
    var_nbrs: tuple[tuple[int, ...], ...]

    @property
    def num_edges(self) -> int:
        return sum(len(n) for n in self.check_nbrs)


def tanner_adjacency(m: BinaryMatrix) -> TannerGraph:
    checks: list[list[int]] = [[] for _ in range(m.rows)]
    varis: list[list[int]] = [[] for _ in range(m.cols)]
    for r, c in zip(m.r.tolist(), m.c.tolist()):
        checks[r].append(c)
        varis[c].append(r)
    return TannerGraph(
        tuple(tuple(sorted(x)) for x in checks),
        tuple(tuple(sorted(x)) for x in varis),
    )


# ----------------------------------------------------------------------------
# alist

def to_alist(m: BinaryMatrix) -> str:
    """Serialise to MacKay's alist text format (1-based, zero padded)."""
    g = tanner_adjacency(m)
    cw = [len(x) for x in g.var_nbrs]
    rw = [len(x) for x in g.check_nbrs]
    max_c = max(cw, default=0)
    max_r = max(rw, default=0)
    lines = [
        f"{m.cols} {m.rows}",
        f"{max_c} {max_r}",
        " ".join(map(str, cw)),
        " ".join(map(str, rw)),
    ]
    for nb in g.var_nbrs:
        lines.append(" ".join(str(x + 1) for x in nb) + " 0" * (max_c - len(nb)))
    for nb in g.check_nbrs:
        lines.append(" ".join(str(x + 1) for x in nb) + " 0" * (max_r - len(nb)))
    return "\n".join(line.strip() for line in lines) + "\n"


def from_alist(text: str) -> BinaryMatrix:
    tokens = text.split()
    pos = 0

    def take(k: int) -> list[int]:
        nonlocal pos
        out = [int(t) for t in tokens[pos:pos + k]]
        if len(out) != k:
            raise ValueError("truncated alist")
        pos += k
        return out

    n, m = take(2)
    max_c, max_r = take(2)
    cw = take(n)
    rw = take(m)
    entries = set()
    for col in range(n):
        for x in take(max_c)[: cw[col]]:
            entries.add((x - 1, col))
    seen = set()
    for row in range(m):
        for x in take(max_r)[: rw[row]]:
            seen.add((row, x - 1))
    if seen != entries:
        raise ValueError("alist column and row sections disagree")
    return BinaryMatrix.from_entries(m, n, sorted(entries))
