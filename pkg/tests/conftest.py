"""Independent oracles shared by the test modules.

These deliberately avoid the package's own counting code: cycles come from
networkx, ranks from dense numpy elimination.
"""

import networkx as nx
import numpy as np
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def nx_6cycles(h) -> int:
    g = nx.Graph()
    g.add_edges_from((("c", int(r)), ("v", int(c))) for r, c in zip(h.r, h.c))
    return sum(1 for cyc in nx.simple_cycles(g, length_bound=6) if len(cyc) == 6)


def nx_has_4cycle(h) -> bool:
    g = nx.Graph()
    g.add_edges_from((("c", int(r)), ("v", int(c))) for r, c in zip(h.r, h.c))
    return any(len(cyc) == 4 for cyc in nx.simple_cycles(g, length_bound=4))


def dense_rank_gf2(a) -> int:
    a = (np.array(a, dtype=np.uint8) % 2).copy()
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        piv = np.nonzero(a[rank:, c])[0]
        if not piv.size:
            continue
        k = rank + piv[0]
        a[[rank, k]] = a[[k, rank]]
        hit = np.nonzero(a[:, c])[0]
        hit = hit[hit != rank]
        a[hit] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def shift_block(z: int, p: int) -> np.ndarray:
    """``Shift(z)`` built straight from its definition: ones at ``((z + k) mod p, k)``."""
    out = np.zeros((p, p), np.uint8)
    for k in range(p):
        out[(z + k) % p, k] = 1
    return out
