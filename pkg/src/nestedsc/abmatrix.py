"""Array-based parity-check matrices and their nested row-group sub-matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf2 import CirculantGrid


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class ABMatrixSpec:
    """Identity of a nested AB matrix: ``gamma`` row groups, prime ``p`` and the selected rows."""

    gamma: int
    p: int
    row_groups: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "row_groups", tuple(int(q) for q in self.row_groups))
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if not 1 <= self.gamma <= self.p:
            raise ValueError("need 1 <= gamma <= p")
        rg = self.row_groups
        if list(rg) != sorted(set(rg)):
            raise ValueError("row groups must be distinct and sorted")
        if rg and (rg[0] < 0 or rg[-1] >= self.gamma):
            raise ValueError("row group out of range")

    @property
    def omega(self) -> int:
        """Column weight of the selected sub-matrix."""
        return len(self.row_groups)

    def grid(self) -> CirculantGrid:
        return extract_nested(build_ab(self.gamma, self.p), self.row_groups)


def build_ab(gamma: int, p: int) -> CirculantGrid:
    """The ``gamma x p`` array grid with cell ``(q, j) = Shift(q*j mod p)``."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if not 1 <= gamma <= p:
        raise ValueError("need 1 <= gamma <= p")
    q = np.arange(gamma)[:, None]
    j = np.arange(p)[None, :]
    return CirculantGrid((q * j) % p, p)


def extract_nested(ab: CirculantGrid, row_groups: Sequence[int]) -> CirculantGrid:
    rg = [int(q) for q in row_groups]
    if len(set(rg)) != len(rg):
        raise ValueError("duplicate row group")
    if any(q < 0 or q >= ab.block_rows for q in rg):
        raise ValueError("row group out of range")
    return CirculantGrid(ab.cells[rg, :], ab.block_size)


def default_nested_rows(omega: int, h: int = 0) -> tuple[int, ...]:
    """Row groups ``(0, 1, ..., omega-2, omega-1+h)`` of the standard nested family."""
    if omega < 1 or h < 0:
        raise ValueError("omega >= 1 and h >= 0 required")
    return tuple(range(omega - 1)) + (omega - 1 + h,)


def cover_size(omega: int) -> int:
    """Number of weight-3 sub-matrices needed to touch every row group."""
    return (omega - 1) // 2 + (omega - 1) % 2


def weight3_cover(row_groups: Sequence[int]) -> list[tuple[int, int, int]]:
    """Row-group triples, all containing group 0, that together cover ``row_groups``.

    The non-zero groups are paired off in order; a leftover group is joined
    with the first non-zero group. This is the lexicographically smallest
    valid cover.
    """
    rg = sorted(int(q) for q in row_groups)
    if len(rg) < 3:
        raise ValueError("need at least three row groups")
    if len(set(rg)) != len(rg):
        raise ValueError("duplicate row group")
    if rg[0] != 0:
        raise ValueError("row group 0 must be selected")
    others = rg[1:]
    triples = [(0, others[i], others[i + 1]) for i in range(0, len(others) - 1, 2)]
    if len(others) % 2:
        triples.append((0, others[0], others[-1]))
    return triples
