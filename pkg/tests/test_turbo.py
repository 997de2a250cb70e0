import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcturbo import permutation as P
from qcturbo.analysis import codeword_weight, trellis_weight
from qcturbo.errors import TailBitingError, ValidationError
from qcturbo.rsc import RscCode, encode_from_state, encode_tail_biting, lambda_parameter
from qcturbo.turbo import (
    LlrFrame,
    TurboCode,
    TurboCodeword,
    bcjr_tail_biting,
    depuncture,
    puncture,
    turbo_decode,
    turbo_encode,
)


def all_words(n):
    return ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def brute_force_app(code, lsys, lpar, prior):
    """A-posteriori LLRs by summing over every tail-biting codeword."""
    n = lsys.size
    words = all_words(n)
    par = encode_tail_biting(code, words)
    metric = (0.5 * (lsys + prior) * (1 - 2.0 * words) + 0.5 * lpar * (1 - 2.0 * par)).sum(axis=1)
    app = np.empty(n)
    for t in range(n):
        zero = words[:, t] == 0
        app[t] = np.logaddexp.reduce(metric[zero]) - np.logaddexp.reduce(metric[~zero])
    return app


def noisy_frame(code, n, sigma, rng):
    bits = rng.integers(0, 2, n).astype(np.uint8)
    par = encode_tail_biting(code, bits)
    scale = 2 / sigma**2
    lsys = scale * (1 - 2.0 * bits + sigma * rng.standard_normal(n))
    lpar = scale * (1 - 2.0 * par + sigma * rng.standard_normal(n))
    prior = rng.normal(0, 1, n)
    return bits, lsys, lpar, prior


@pytest.fixture(scope="module")
def fig1_tc(fig1_perm, code75):
    return TurboCode(code75, fig1_perm, "none")


def test_turbo_code_properties(fig1_perm, code75):
    tc = TurboCode(code75, fig1_perm, "alternate")
    assert tc.n == 25 and tc.transmitted_length == 50 and tc.rate == 0.5
    assert TurboCode(code75, fig1_perm, "none").rate == pytest.approx(1 / 3)
    with pytest.raises(ValidationError):
        TurboCode(code75, fig1_perm, "random")
    with pytest.raises(ValidationError):
        TurboCode(code75, fig1_perm, termination="zero")


def test_turbo_code_rejects_singular_length():
    with pytest.raises(TailBitingError):
        TurboCode(RscCode(0o37, 0o21), P.load_table3())
    tc = TurboCode(RscCode(0o37, 0o21), P.load_table3(), termination="open")
    assert tc.n == 1600


def test_all_zero_codeword(fig1_tc):
    cw = turbo_encode(fig1_tc, np.zeros(25, np.uint8))
    assert cw.weight == 0 and cw.punctured_length == 75


def test_encoder_branches(fig1_tc, rng):
    s = rng.integers(0, 2, 25).astype(np.uint8)
    cw = turbo_encode(fig1_tc, s)
    assert np.array_equal(cw.systematic, s)
    assert np.array_equal(cw.parity1, encode_tail_biting(fig1_tc.code, s))
    assert np.array_equal(cw.parity2, encode_tail_biting(fig1_tc.code, s[fig1_tc.perm.table]))
    branch1 = int(s.sum() + cw.parity1.sum())
    branch2 = int(s.sum() + cw.parity2.sum())
    assert cw.weight >= max(branch1, branch2)
    with pytest.raises(ValidationError):
        turbo_encode(fig1_tc, s[:24])


def test_lemma2_inequality_fig1(fig1_tc, rng):
    lam = lambda_parameter(fig1_tc.code)
    perm = fig1_tc.perm
    for _ in range(500):
        s = rng.integers(0, 2, 25).astype(np.uint8)
        if not s.any():
            continue
        w = turbo_encode(fig1_tc, s).weight
        assert trellis_weight(fig1_tc.code, s) + trellis_weight(fig1_tc.code, perm.interleave(s)) <= 2 * w / lam


def test_lemma2_inequality_n64(code75, rng):
    tc = TurboCode(code75, P.build_qc_permutation(P.sample_qc(8, 8, 4)), "none")
    lam = lambda_parameter(code75)
    for _ in range(300):
        s = (rng.random(64) < rng.uniform(0.02, 0.5)).astype(np.uint8)
        if not s.any():
            continue
        w = turbo_encode(tc, s).weight
        assert trellis_weight(code75, s) + trellis_weight(code75, tc.perm.interleave(s)) <= 2 * w / lam


def test_quasi_cyclic_codebook_symmetry(fig1_tc, rng):
    for _ in range(50):
        s = rng.integers(0, 2, 25).astype(np.uint8)
        cw = turbo_encode(fig1_tc, s)
        shifted = turbo_encode(fig1_tc, np.roll(s, 5))
        assert np.array_equal(shifted.parity1, np.roll(cw.parity1, 5))
        assert np.array_equal(shifted.parity2, np.roll(cw.parity2, 5))
        assert shifted.weight == cw.weight


def test_puncture_example():
    a = np.array([10, 11, 12, 13])
    b = np.array([20, 21, 22, 23])
    cw = TurboCodeword(np.array([1, 2, 3, 4]), a, b, 8)
    assert puncture(cw, "alternate").tolist() == [1, 2, 3, 4, 10, 21, 12, 23]
    assert puncture(cw, "none").tolist() == [1, 2, 3, 4, 10, 11, 12, 13, 20, 21, 22, 23]


def test_depuncture_round_trip(rng):
    n = 10
    cw = TurboCodeword(rng.normal(size=n), rng.normal(size=n), rng.normal(size=n), 2 * n)
    frame = depuncture(puncture(cw, "alternate"), n, "alternate")
    even = np.arange(n) % 2 == 0
    assert np.array_equal(frame.channel_sys, cw.systematic)
    assert np.array_equal(frame.channel_p1[even], cw.parity1[even])
    assert np.array_equal(frame.channel_p2[~even], cw.parity2[~even])
    assert not frame.channel_p1[~even].any() and not frame.channel_p2[even].any()
    full = depuncture(puncture(cw, "none"), n, "none")
    assert np.array_equal(full.channel_p2, cw.parity2)
    with pytest.raises(ValidationError):
        depuncture(np.zeros(2 * n - 1), n, "alternate")


def test_llr_frame_validation():
    with pytest.raises(FloatingPointError):
        LlrFrame([0.0, np.inf], [0, 0], [0, 0])
    with pytest.raises(ValidationError):
        LlrFrame([0.0, 1.0], [0], [0, 0])
    assert LlrFrame([1.0], [0.0], [0.0]).extrinsic.tolist() == [0.0]


def test_bcjr_zero_input_gives_zero(code1315):
    z = np.zeros(30)
    assert np.allclose(bcjr_tail_biting(code1315.trellis, z, z, z), 0.0)
    assert np.allclose(bcjr_tail_biting(code1315.trellis, z, z, z, exact=True), 0.0)


def test_bcjr_rejects_non_finite(code75):
    z = np.zeros(8)
    bad = z.copy()
    bad[3] = np.nan
    with pytest.raises(FloatingPointError):
        bcjr_tail_biting(code75.trellis, bad, z)
    with pytest.raises(ValidationError):
        bcjr_tail_biting(code75.trellis, z, z, wraps=0)


def test_bcjr_noiseless_high_confidence(code1315, rng):
    bits = rng.integers(0, 2, 64).astype(np.uint8)
    par = encode_tail_biting(code1315, bits)
    lsys = 20 * (1 - 2.0 * bits)
    lpar = 20 * (1 - 2.0 * par)
    app = bcjr_tail_biting(code1315.trellis, lsys, lpar, return_app=True)
    assert np.array_equal(app < 0, bits.astype(bool))


@pytest.mark.parametrize("n", [7, 10, 11])
def test_exact_bcjr_matches_brute_force(code75, n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        _, lsys, lpar, prior = noisy_frame(code75, n, 0.9, rng)
        oracle = brute_force_app(code75, lsys, lpar, prior)
        for max_log in (False,):
            app = bcjr_tail_biting(code75.trellis, lsys, lpar, prior, exact=True, max_log=max_log, return_app=True)
            assert np.max(np.abs(app - oracle)) < 1e-9


def test_wraparound_bcjr_approaches_exact(code75):
    rng = np.random.default_rng(2)
    _, lsys, lpar, prior = noisy_frame(code75, 40, 0.8, rng)
    exact = bcjr_tail_biting(code75.trellis, lsys, lpar, prior, exact=True, return_app=True)
    errors = [
        np.max(np.abs(bcjr_tail_biting(code75.trellis, lsys, lpar, prior, wraps=w, return_app=True) - exact))
        for w in (1, 2, 4)
    ]
    assert errors[1] <= errors[0]
    assert errors[2] < 1e-2


def test_extrinsic_excludes_own_prior(code75):
    rng = np.random.default_rng(9)
    _, lsys, lpar, prior = noisy_frame(code75, 11, 0.9, rng)
    base = bcjr_tail_biting(code75.trellis, lsys, lpar, prior, exact=True)
    k = 4
    bumped = prior.copy()
    bumped[k] *= 2
    bumped[k] += 1
    moved = bcjr_tail_biting(code75.trellis, lsys, lpar, bumped, exact=True)
    assert moved[k] == pytest.approx(base[k], abs=1e-9)
    others = np.delete(np.abs(moved - base), k)
    assert others.max() > 1e-6


def test_open_start_decoding(code1315, rng):
    bits = rng.integers(0, 2, 50).astype(np.uint8)
    par, _ = encode_from_state(code1315, bits, 0)
    app = bcjr_tail_biting(code1315.trellis, 8 * (1 - 2.0 * bits), 8 * (1 - 2.0 * par), open_start=True, return_app=True)
    assert np.array_equal(app < 0, bits.astype(bool))


def test_max_log_close_at_high_snr(code75):
    rng = np.random.default_rng(5)
    _, lsys, lpar, prior = noisy_frame(code75, 10, 0.5, rng)
    a = bcjr_tail_biting(code75.trellis, lsys, lpar, prior, exact=True, return_app=True)
    b = bcjr_tail_biting(code75.trellis, lsys, lpar, prior, exact=True, max_log=True, return_app=True)
    assert np.array_equal(a < 0, b < 0)


def _channel_frame(tc, s, amplitude=20.0):
    cw = turbo_encode(tc, s)
    symbols = amplitude * (1 - 2.0 * puncture(cw, tc.puncture))
    return depuncture(symbols, tc.n, tc.puncture)


@pytest.mark.parametrize("pattern", ["none", "alternate"])
def test_turbo_noiseless_one_iteration(code1315, pattern, rng):
    tc = TurboCode(code1315, P.load_table2(), pattern)
    s = rng.integers(0, 2, 400).astype(np.uint8)
    result = turbo_decode(tc, _channel_frame(tc, s), iterations=1)
    assert np.array_equal(result.bits, s)
    bits, trace = result
    assert len(trace) == 1


def test_turbo_decode_deterministic(code1315):
    tc = TurboCode(code1315, P.load_table2())
    rng = np.random.default_rng(1)
    s = rng.integers(0, 2, 400).astype(np.uint8)
    frame = _channel_frame(tc, s, 1.0)
    frame.channel_sys += rng.normal(0, 1.5, 400)
    frame.channel_p1 += rng.normal(0, 1.5, 400)
    a = turbo_decode(tc, frame, 6)
    b = turbo_decode(tc, frame, 6)
    assert np.array_equal(a.bits, b.bits)
    assert np.array_equal(a.app, b.app)
    assert a.flips.size == 6


def test_turbo_decode_open_termination():
    tc = TurboCode(RscCode(0o37, 0o21), P.load_table3(), termination="open")
    rng = np.random.default_rng(3)
    s = rng.integers(0, 2, 1600).astype(np.uint8)
    assert np.array_equal(turbo_decode(tc, _channel_frame(tc, s), 2).bits, s)


def test_turbo_decode_validation(fig1_tc):
    frame = _channel_frame(fig1_tc, np.zeros(25, np.uint8))
    with pytest.raises(ValidationError):
        turbo_decode(fig1_tc, frame, iterations=0)
    with pytest.raises(ValidationError):
        turbo_decode(fig1_tc, LlrFrame(np.zeros(5), np.zeros(5), np.zeros(5)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), pattern=st.sampled_from(["none", "alternate"]))
def test_codeword_weight_matches_puncture(seed, pattern, fig1_perm, code75):
    tc = TurboCode(code75, fig1_perm, pattern)
    s = np.random.default_rng(seed).integers(0, 2, 25).astype(np.uint8)
    assert codeword_weight(tc, s) == int(puncture(turbo_encode(tc, s), pattern).sum())
