"""Reusable experiment setups: random-spreading baselines, optimized families and the desk-scale BER comparison."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .abmatrix import ABMatrixSpec
from .alc import alc_total
from .census import CYCLES, VN_INCIDENCE
from .channel import ChannelConfig, DecoderConfig, SweepPoint, ber_sweep, flood_decoder, sliding_decoder
from .coupling import SCCodeSpec, SpreadingMatrix
from .gf2 import BinaryMatrix, rank_gf2
from .lifting import bc_spec, search_lift
from .optimizer import NestedPlan, run_plan


def code_rate(h: BinaryMatrix) -> float:
    return 1.0 - rank_gf2(h) / h.cols


def random_family(gamma: int, p: int, m: int, rows: Sequence[int], rng: np.random.Generator) -> SCCodeSpec:
    base = ABMatrixSpec(gamma, p, tuple(rows))
    return SCCodeSpec(base, SpreadingMatrix.random(base.omega, p, m, rng), m + 1)


def random_baseline(
    p: int, m: int, samples: int = 200, seed: int = 0, gamma: int = 3, rows: Sequence[int] = (0, 1, 2)
) -> dict[str, float]:
    """Mean asymptotic average 6-cycle count over uniformly random spreading matrices."""
    rng = np.random.default_rng(seed)
    acc = {CYCLES: Fraction(0), VN_INCIDENCE: Fraction(0)}
    for _ in range(samples):
        rep = alc_total(random_family(max(gamma, max(rows) + 1), p, m, rows, rng))
        for conv in acc:
            acc[conv] += rep.average(conv)
    return {conv: float(v / samples) for conv, v in acc.items()}


@dataclass(frozen=True)
class DeskCodes:
    """Lifted SC code and the block code whose length equals its constraint length."""

    sc: SCCodeSpec
    bc: SCCodeSpec
    sc_residual: int
    bc_residual: int

    @property
    def window_symbols(self) -> int:
        return 4 * self.sc.nu_lifted


def desk_codes(p: int = 7, m: int = 2, L: int = 20, J: int = 5, seed: int = 0, lift_budget: int = 100_000) -> DeskCodes:
    """Method-1 optimized global code lifted by ``J`` and ``H(3, p)`` lifted by ``J (m+1)``."""
    g = run_plan(NestedPlan(3, p, m, seed=seed)).global_code
    lr = search_lift(g, J, lift_budget, seed)
    bc = bc_spec(ABMatrixSpec(3, p, (0, 1, 2)))
    lb = search_lift(bc, J * (m + 1), lift_budget, seed)
    return DeskCodes(g.with_L(L).with_lift(lr.assignment), bc.with_lift(lb.assignment), lr.residual, lb.residual)


def simulate_sc(
    spec: SCCodeSpec,
    snrs: Sequence[float],
    seed: int = 0,
    min_frame_errors: int = 100,
    max_frames: int = 10**6,
    decoder: Optional[DecoderConfig] = None,
) -> list[SweepPoint]:
    h = spec.matrix()
    dec = sliding_decoder(spec, decoder or DecoderConfig(window_stop=True))
    return ber_sweep(dec.decode, h.cols, ChannelConfig(tuple(snrs), code_rate(h), seed, max_frames, 0, min_frame_errors))


def simulate_bc(
    spec: SCCodeSpec,
    snrs: Sequence[float],
    seed: int = 0,
    min_frame_errors: int = 100,
    max_frames: int = 10**6,
    decoder: Optional[DecoderConfig] = None,
) -> list[SweepPoint]:
    h = spec.matrix()
    dec = flood_decoder(h, decoder or DecoderConfig())
    return ber_sweep(dec, h.cols, ChannelConfig(tuple(snrs), code_rate(h), seed, max_frames, 0, min_frame_errors))
