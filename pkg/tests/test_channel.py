import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nestedsc.abmatrix import ABMatrixSpec
from nestedsc.channel import (
    CLIP,
    CSV_HEADER,
    ChannelConfig,
    DecoderConfig,
    ber_sweep,
    bp_flood,
    bp_sliding_window,
    flood_decoder,
    frame_rng,
    results_csv,
    sliding_decoder,
    transmit_allzero,
    uncoded_ber,
)
from nestedsc.coupling import SCCodeSpec, SpreadingMatrix
from nestedsc.gf2 import expand
from nestedsc.lifting import bc_spec, search_lift


def reference_bp(h_dense, llr, iters):
    """Textbook dense sum-product, run for exactly ``iters`` iterations."""
    H = np.asarray(h_dense, bool)
    v2c = np.where(H, llr[None, :], 0.0)
    post = llr.copy()
    lim = math.tanh(CLIP / 2)
    for _ in range(iters):
        t = np.where(H, np.tanh(0.5 * v2c), 1.0)
        c2v = np.zeros_like(v2c)
        for c in range(H.shape[0]):
            for v in np.nonzero(H[c])[0]:
                others = np.prod(np.delete(t[c], v))
                c2v[c, v] = 2 * math.atanh(min(max(others, -lim), lim))
        post = llr + c2v.sum(axis=0)
        v2c = np.where(H, np.clip(post[None, :] - c2v, -CLIP, CLIP), 0.0)
    return post


@pytest.fixture(scope="module")
def h37():
    return expand(ABMatrixSpec(3, 7, (0, 1, 2)).grid())


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1), st.floats(0.3, 1.5), st.integers(1, 6))
def test_flooding_matches_dense_reference(h37, seed, sigma2, iters):
    llr = transmit_allzero(h37.cols, sigma2, np.random.default_rng(seed))
    res = bp_flood(h37, llr, DecoderConfig(max_iterations=iters, syndrome_stop=False))
    ref = reference_bp(h37.to_dense(), llr, iters)
    assert res.iterations == iters
    confident = np.abs(ref) > 1e-6
    assert np.array_equal(res.bits[confident], (ref < 0)[confident])


def test_noiseless_frame_decodes_in_one_iteration(h37):
    res = bp_flood(h37, np.full(h37.cols, 4.0))
    assert res.syndrome_ok and res.iterations == 1 and not res.bits.any()


def test_single_weak_error_is_corrected(h37):
    llr = np.full(h37.cols, 3.0)
    llr[5] = -1.0
    res = bp_flood(h37, llr)
    assert res.syndrome_ok and not res.bits.any()


def test_llr_statistics():
    sigma2 = 0.5
    llr = transmit_allzero(200_000, sigma2, np.random.default_rng(0))
    assert abs(llr.mean() - 2 / sigma2) < 0.03
    assert abs(llr.var() - 4 / sigma2) < 0.1
    assert np.abs(llr).max() <= CLIP


def test_noise_variance_formula():
    cfg = ChannelConfig((0.0,), 0.5)
    assert cfg.sigma2(0.0) == pytest.approx(1.0)
    assert cfg.sigma2(10 * math.log10(2)) == pytest.approx(0.5)


def test_uncoded_hard_decisions_match_q_function():
    n = 1000
    pts = ber_sweep(lambda llr: (llr < 0).astype(np.uint8), n, ChannelConfig((2.0,), 1.0, max_frames=200, min_frame_errors=10**9))
    assert abs(pts[0].ber - uncoded_ber(2.0)) < 3 * pts[0].ci95 + 1e-4


def test_sweep_is_reproducible_and_csv_header(h37):
    dec = flood_decoder(h37)
    cfg = ChannelConfig((1.0, 2.0), 4 / 7, seed=5, max_frames=300, min_frame_errors=20)
    a, b = ber_sweep(dec, h37.cols, cfg), ber_sweep(dec, h37.cols, cfg)
    assert a == b
    text = results_csv(a)
    assert text.splitlines()[0] == ",".join(CSV_HEADER) == "snr_db,frames,bit_errors,frame_errors,ber,fer,ci95"
    assert len(text.splitlines()) == 3


def test_sweep_stops_at_error_target(h37):
    pts = ber_sweep(flood_decoder(h37), h37.cols, ChannelConfig((0.0,), 4 / 7, max_frames=10_000, min_frame_errors=25))
    assert pts[0].frame_errors == 25


def test_frame_streams_are_independent_of_order():
    a = frame_rng(1, 0, 7).standard_normal(3)
    frame_rng(1, 0, 3).standard_normal(3)
    assert np.array_equal(a, frame_rng(1, 0, 7).standard_normal(3))
    assert not np.array_equal(a, frame_rng(1, 1, 7).standard_normal(3))


def test_more_snr_means_fewer_errors():
    bc = bc_spec(ABMatrixSpec(3, 7, (0, 1, 2)))
    h = bc.with_lift(search_lift(bc, 3, seed=0).assignment).matrix()
    pts = ber_sweep(flood_decoder(h), h.cols, ChannelConfig((0.0, 6.0), 4 / 7, max_frames=2000, min_frame_errors=100))
    assert pts[0].frame_errors >= 100
    assert pts[1].ber < pts[0].ber


@pytest.fixture(scope="module")
def small_sc():
    spec = SCCodeSpec(ABMatrixSpec(3, 5, (0, 1, 2)), SpreadingMatrix.random(3, 5, 1, np.random.default_rng(1)), 2)
    return spec.with_lift(search_lift(spec, 3, seed=0).assignment).with_L(8)


def test_window_decoder_commits_every_block(small_sc):
    cfg = DecoderConfig(window_symbols=3 * 75)
    dec = sliding_decoder(small_sc, cfg)
    trace = []
    llr = np.full(small_sc.matrix().cols, 3.0)
    llr[[3, 100, 400]] = -0.5
    bits = dec.decode(llr, trace)
    assert len(trace) == small_sc.L
    assert not bits.any()
    assert np.array_equal(bits, bp_sliding_window(small_sc, llr, cfg))


def test_window_decoder_matches_flooding_at_high_snr(small_sc):
    h = small_sc.matrix()
    cfg = ChannelConfig((5.0,), 0.3, max_frames=30, min_frame_errors=10**9)
    a = ber_sweep(sliding_decoder(small_sc, DecoderConfig(window_stop=True)).decode, h.cols, cfg)
    b = ber_sweep(flood_decoder(h), h.cols, cfg)
    assert a[0].bit_errors == b[0].bit_errors == 0


def test_window_validation(small_sc):
    with pytest.raises(ValueError, match="constraint span"):
        sliding_decoder(small_sc, DecoderConfig(window_symbols=75))
    with pytest.raises(ValueError, match="multiple"):
        sliding_decoder(small_sc, DecoderConfig(window_symbols=100))
    with pytest.raises(ValueError, match="target block"):
        sliding_decoder(small_sc, DecoderConfig(target_block_symbols=10))


def test_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig(max_iterations=0)
    with pytest.raises(ValueError):
        ChannelConfig((1.0,), 1.5)
