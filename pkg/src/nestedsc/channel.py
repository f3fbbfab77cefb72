"""BPSK/AWGN Monte-Carlo: flooding sum-product BP, sliding-window BP and BER sweeps.

Simulations send the all-zero codeword (bit 0 -> +1), which is enough for
linear codes on this symmetric channel with a symmetric decoder.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

from .gf2 import BinaryMatrix

CLIP = 25.0
CSV_HEADER = ("snr_db", "frames", "bit_errors", "frame_errors", "ber", "fer", "ci95")


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: tuple[float, ...]
    rate: float
    seed: int = 0
    max_frames: int = 10_000
    min_bit_errors: int = 0
    min_frame_errors: int = 100

    def __post_init__(self):
        object.__setattr__(self, "ebn0_db", tuple(float(x) for x in self.ebn0_db))
        if not 0 < self.rate <= 1:
            raise ValueError("rate must lie in (0, 1]")
        if self.max_frames < 1:
            raise ValueError("max_frames must be positive")

    def sigma2(self, ebn0_db: float) -> float:
        """Noise variance per dimension for unit-energy BPSK."""
        return 1.0 / (2.0 * self.rate * 10.0 ** (ebn0_db / 10.0))


@dataclass(frozen=True)
class DecoderConfig:
    """``window_symbols`` and ``target_block_symbols`` apply to sliding-window decoding.

    ``syndrome_stop`` stops flooding BP once all checks are satisfied;
    ``window_stop`` ends a window position once every check touching its
    target block is satisfied (off by default, so each position runs
    ``max_iterations``).
    """

    max_iterations: int = 50
    window_symbols: Optional[int] = None
    target_block_symbols: Optional[int] = None
    syndrome_stop: bool = True
    window_stop: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")
        if self.window_symbols is not None and self.target_block_symbols is not None:
            if self.window_symbols % self.target_block_symbols:
                raise ValueError("window must be a multiple of the column-block size")


def transmit_allzero(n: int, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Channel LLRs ``2 y / sigma^2`` for the all-zero word, clipped to +-CLIP."""
    if n < 1:
        raise ValueError("need n >= 1")
    if sigma2 <= 0:
        return np.full(n, CLIP)
    y = 1.0 + math.sqrt(sigma2) * rng.standard_normal(n)
    return np.clip(2.0 * y / sigma2, -CLIP, CLIP)


# ----------------------------------------------------------------------------
# sum-product kernel


@dataclass(frozen=True)
class _Graph:
    """Edges sorted by check (``cptr``/``evar``) with the per-variable edge index."""

    n_checks: int
    n_vars: int
    cptr: np.ndarray
    evar: np.ndarray
    vptr: np.ndarray
    vedge: np.ndarray

    @classmethod
    def of(cls, h: BinaryMatrix) -> "_Graph":
        order = np.lexsort((h.c, h.r))
        r, c = h.r[order], h.c[order]
        cptr = np.zeros(h.rows + 1, np.int64)
        np.cumsum(np.bincount(r, minlength=h.rows), out=cptr[1:])
        vedge = np.argsort(c, kind="stable").astype(np.int64)
        vptr = np.zeros(h.cols + 1, np.int64)
        np.cumsum(np.bincount(c, minlength=h.cols), out=vptr[1:])
        return cls(h.rows, h.cols, cptr, c.astype(np.int64), vptr, vedge)


@njit(cache=True)
def _bp_kernel(cptr, evar, vptr, vedge, prior, iters, stop, clip):
    n_checks = cptr.size - 1
    n_vars = vptr.size - 1
    n_edges = evar.size
    v2c = np.empty(n_edges)
    c2v = np.zeros(n_edges)
    tmp = np.empty(n_edges)
    post = prior.copy()
    for e in range(n_edges):
        v2c[e] = prior[evar[e]]
    lim = math.tanh(clip / 2.0)
    used = 0
    ok = False
    for it in range(iters):
        used = it + 1
        for c in range(n_checks):
            prod = 1.0
            nzero = 0
            for e in range(cptr[c], cptr[c + 1]):
                t = math.tanh(0.5 * v2c[e])
                tmp[e] = t
                if t == 0.0:
                    nzero += 1
                else:
                    prod *= t
            for e in range(cptr[c], cptr[c + 1]):
                if nzero == 0:
                    x = prod / tmp[e]
                elif nzero == 1 and tmp[e] == 0.0:
                    x = prod
                else:
                    x = 0.0
                if x > lim:
                    x = lim
                elif x < -lim:
                    x = -lim
                c2v[e] = 2.0 * math.atanh(x)
        for v in range(n_vars):
            total = prior[v]
            for k in range(vptr[v], vptr[v + 1]):
                total += c2v[vedge[k]]
            post[v] = total
            for k in range(vptr[v], vptr[v + 1]):
                e = vedge[k]
                m = total - c2v[e]
                if m > clip:
                    m = clip
                elif m < -clip:
                    m = -clip
                v2c[e] = m
        ok = True
        for c in range(n_checks):
            par = 0
            for e in range(cptr[c], cptr[c + 1]):
                if post[evar[e]] < 0.0:
                    par ^= 1
            if par:
                ok = False
                break
        if stop and ok:
            break
    return post, used, ok


def _run(g: _Graph, prior: np.ndarray, iters: int, stop: bool):
    return _bp_kernel(g.cptr, g.evar, g.vptr, g.vedge, np.ascontiguousarray(prior, np.float64), iters, stop, CLIP)


@dataclass(frozen=True)
class DecodeResult:
    bits: np.ndarray
    iterations: int
    syndrome_ok: bool


def bp_flood(h: BinaryMatrix, llrs: np.ndarray, cfg: DecoderConfig = DecoderConfig(), graph: Optional[_Graph] = None) -> DecodeResult:
    """Flooding sum-product decoding; ``syndrome_ok`` is re-checked by explicit multiplication."""
    llrs = np.asarray(llrs, np.float64)
    if llrs.shape != (h.cols,):
        raise ValueError("LLR vector length must equal the number of columns")
    g = graph or _Graph.of(h)
    post, used, _ = _run(g, llrs, cfg.max_iterations, cfg.syndrome_stop)
    bits = (post < 0).astype(np.uint8)
    ok = not h.syndrome(bits).any()
    return DecodeResult(bits, int(used), ok)


@njit(cache=True)
def _window_kernel(cptr, evar, vptr, vedge, prior, post, v2c, c2v, tmp, r_lo, r_hi, v_lo, v_hi, s_lo, s_hi, iters, stop, clip):
    """BP on checks ``r_lo..r_hi-1`` updating only variables ``v_lo..v_hi-1``.

    Messages live in the caller's arrays so they carry over between window
    positions; variables below ``v_lo`` keep their last outgoing messages.
    With ``stop`` set, iterations end once checks ``s_lo..s_hi-1`` hold.
    """
    lim = math.tanh(clip / 2.0)
    used = 0
    for it in range(iters):
        used = it + 1
        for c in range(r_lo, r_hi):
            prod = 1.0
            nzero = 0
            for e in range(cptr[c], cptr[c + 1]):
                t = math.tanh(0.5 * v2c[e])
                tmp[e] = t
                if t == 0.0:
                    nzero += 1
                else:
                    prod *= t
            for e in range(cptr[c], cptr[c + 1]):
                t = tmp[e]
                if nzero == 0:
                    x = prod / t
                elif nzero == 1 and t == 0.0:
                    x = prod
                else:
                    x = 0.0
                if x > lim:
                    x = lim
                elif x < -lim:
                    x = -lim
                c2v[e] = 2.0 * math.atanh(x)
        for v in range(v_lo, v_hi):
            total = prior[v]
            for k in range(vptr[v], vptr[v + 1]):
                total += c2v[vedge[k]]
            post[v] = total
            for k in range(vptr[v], vptr[v + 1]):
                e = vedge[k]
                m = total - c2v[e]
                if m > clip:
                    m = clip
                elif m < -clip:
                    m = -clip
                v2c[e] = m
        if stop:
            ok = True
            for c in range(s_lo, s_hi):
                par = 0
                for e in range(cptr[c], cptr[c + 1]):
                    if post[evar[e]] < 0.0:
                        par ^= 1
                if par:
                    ok = False
                    break
            if ok:
                break
    return used


class SlidingWindowDecoder:
    """Window decoder for a terminated SC matrix with ``L`` column blocks.

    Position ``t`` runs BP on row blocks ``t .. t+W-1`` (all remaining rows
    once the window reaches the end) and updates column blocks
    ``t .. t+W-1``; block ``t`` is then committed. Messages persist between
    positions and committed blocks ``t-m .. t-1`` only feed in their last
    outgoing messages.
    """

    def __init__(self, h: BinaryMatrix, L: int, m: int, col_block: int, row_block: int, cfg: DecoderConfig):
        if h.cols != L * col_block or h.rows != (L + m) * row_block:
            raise ValueError("matrix shape does not match the block structure")
        w = cfg.window_symbols if cfg.window_symbols is not None else 4 * (m + 1) * col_block
        if w % col_block:
            raise ValueError("window must be a multiple of the column-block size")
        wb = w // col_block
        if wb < m + 1:
            raise ValueError(f"window of {wb} blocks is smaller than the constraint span {m + 1}")
        self.h, self.L, self.m, self.cb, self.rb, self.cfg, self.wb = h, L, m, col_block, row_block, cfg, wb
        self.graph = _Graph.of(h)
        self.windows = []
        for t in range(L):
            y_hi = L + m if t + wb >= L else t + wb
            self.windows.append((t * row_block, y_hi * row_block, t * col_block, min(t + wb, L) * col_block))

    def decode(self, llrs: np.ndarray, trace: Optional[list] = None) -> np.ndarray:
        prior = np.ascontiguousarray(llrs, np.float64)
        if prior.shape != (self.h.cols,):
            raise ValueError("LLR vector length must equal the number of columns")
        g = self.graph
        post = prior.copy()
        v2c = prior[g.evar].copy()
        c2v = np.zeros_like(v2c)
        tmp = np.empty_like(v2c)
        bits = np.zeros(self.h.cols, np.uint8)
        cb, rb, m = self.cb, self.rb, self.m
        self.iterations = 0
        for t, (r_lo, r_hi, v_lo, v_hi) in enumerate(self.windows):
            # checks touching the target block: row blocks t .. t+m
            s_lo, s_hi = t * rb, (t + m + 1) * rb
            self.iterations += _window_kernel(
                g.cptr, g.evar, g.vptr, g.vedge, prior, post, v2c, c2v, tmp,
                r_lo, r_hi, v_lo, v_hi, s_lo, s_hi, self.cfg.max_iterations, self.cfg.window_stop, CLIP,
            )
            bits[t * cb:(t + 1) * cb] = post[t * cb:(t + 1) * cb] < 0
            if trace is not None:
                trace.append(bits.copy())
        return bits


def bp_sliding_window(spec, llrs: np.ndarray, cfg: DecoderConfig = DecoderConfig()) -> np.ndarray:
    """Sliding-window decoding of an (optionally lifted) SC spec."""
    return sliding_decoder(spec, cfg).decode(llrs)


def sliding_decoder(spec, cfg: DecoderConfig = DecoderConfig()) -> SlidingWindowDecoder:
    J = spec.lift.J if spec.lift else 1
    col_block = spec.p * spec.p * J
    row_block = spec.base.omega * spec.p * J
    if cfg.target_block_symbols is not None and cfg.target_block_symbols != col_block:
        raise ValueError(f"target block must be {col_block} symbols")
    return SlidingWindowDecoder(spec.matrix(), spec.L, spec.m, col_block, row_block, cfg)


# ----------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepPoint:
    snr_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    ci95: float

    @property
    def interval(self) -> tuple[float, float]:
        return self.ber - self.ci95, self.ber + self.ci95


def frame_rng(seed: int, point: int, frame: int) -> np.random.Generator:
    """Independent stream per (seed, SNR index, frame) so results do not depend on scheduling."""
    return np.random.default_rng(np.random.SeedSequence([seed, point, frame]))


def ber_sweep(decoder, n: int, channel: ChannelConfig, progress=None) -> list[SweepPoint]:
    """Monte-Carlo BER/FER per SNR point.

    ``decoder`` maps an LLR vector to hard decisions. A point stops when both
    error minima are met or after ``max_frames``. ``ci95`` is the normal
    half-width of the BER from the per-frame error fractions.
    """
    out = []
    for i, snr in enumerate(channel.ebn0_db):
        s2 = channel.sigma2(snr)
        frames = bit_err = frame_err = 0
        sq = 0.0
        while frames < channel.max_frames:
            if frame_err >= channel.min_frame_errors and bit_err >= channel.min_bit_errors:
                break
            llr = transmit_allzero(n, s2, frame_rng(channel.seed, i, frames))
            e = int(np.count_nonzero(decoder(llr)))
            frames += 1
            bit_err += e
            frame_err += e > 0
            sq += (e / n) ** 2
            if progress is not None:
                progress(snr, frames, bit_err, frame_err)
        ber = bit_err / (frames * n)
        var = max(sq / frames - ber * ber, 0.0)
        ci = 1.96 * math.sqrt(var / frames) if frames > 1 else float("inf")
        out.append(SweepPoint(snr, frames, bit_err, frame_err, ber, frame_err / frames, ci))
    return out


def flood_decoder(h: BinaryMatrix, cfg: DecoderConfig = DecoderConfig()):
    g = _Graph.of(h)
    return lambda llr: bp_flood(h, llr, cfg, g).bits


def results_csv(points: Sequence[SweepPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for pt in points:
        w.writerow([pt.snr_db, pt.frames, pt.bit_errors, pt.frame_errors, f"{pt.ber:.6e}", f"{pt.fer:.6e}", f"{pt.ci95:.6e}"])
    return buf.getvalue()


def uncoded_ber(ebn0_db: float, rate: float = 1.0) -> float:
    """Hard-decision BPSK bit error probability ``Q(sqrt(2 rate Eb/N0))``."""
    return 0.5 * math.erfc(math.sqrt(rate * 10 ** (ebn0_db / 10)))
