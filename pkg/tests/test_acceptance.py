"""Acceptance criteria 1-12, one test each.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.  ``python tests/test_acceptance.py`` does the same.
"""

import importlib.util
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from qcturbo import analysis as A
from qcturbo import permutation as P
from qcturbo import simulation as S
from qcturbo.rsc import RscCode, encode_tail_biting, lambda_parameter
from qcturbo.turbo import TurboCode, bcjr_tail_biting, turbo_encode

from conftest import FIG1_PRINTED_SHIFTS, FIG1_SHIFTS, FIG1_SIGMA, FIG1_TABLE

DEMOS = Path(__file__).resolve().parents[1] / "demos"


def crit(number, title):
    return pytest.mark.criterion(number, title)


@crit(1, "lambda table")
def test_lambda_table(record_property):
    expected = {
        (0o7, 0o5): Fraction(1, 2),
        (0o13, 0o15): Fraction(2, 5),
        (0o17, 0o15): Fraction(1, 2),
        (0o37, 0o21): Fraction(1, 4),
        (0o23, 0o35): Fraction(4, 11),
    }
    t0 = time.perf_counter()
    got = {gens: lambda_parameter(RscCode(*gens)) for gens in expected}
    elapsed = time.perf_counter() - t0
    record_property("detail", " ".join(str(v) for v in got.values()) + f", {elapsed:.2f} s")
    assert got == expected
    assert elapsed < 1.0


@crit(2, "Figure 1 interleaver listing")
def test_figure1_golden(record_property):
    perm = P.build_qc_permutation(P.QcSpec(5, 5, FIG1_SIGMA, FIG1_SHIFTS))
    assert perm.table.tolist() == FIG1_TABLE
    # The printed shift vector (0,3,4,2,1) does not reproduce the printed listing
    # under the displayed formula; its negation mod 5, (0,2,1,3,4), does.
    printed = P.build_qc_permutation(P.QcSpec(5, 5, FIG1_SIGMA, FIG1_PRINTED_SHIFTS))
    assert printed.table[:3].tolist() == [3, 17, 20]
    assert P.build_qc_permutation(printed.qc.negated()).table.tolist() == FIG1_TABLE
    record_property("detail", "listing matches with shifts (0,2,1,3,4)")


@crit(3, "Figure 3 chain")
def test_figure3_golden(fig1_perm, record_property):
    chain = A.build_chain(fig1_perm, (1, 1, 1), 0)
    record_property("detail", f"x={chain.x} pi_weight={chain.pi_weight}")
    assert chain.x == (0, 13, 14, 21)
    assert chain.pi_weight == 7


@crit(4, "quasi-cyclic property")
def test_lemma1_property_suite(record_property):
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    shapes = [(5, 5), (20, 20), (8, 50), (50, 8)]
    qc_pass = 0
    for k in range(100):
        n1, n2 = shapes[k % 4]
        qc_pass += P.is_quasi_cyclic(P.build_qc_permutation(P.sample_qc(n1, n2, rng)), n2)
    uniform_fail = 0
    for _ in range(100):
        uniform_fail += not P.is_quasi_cyclic(P.sample_uniform(400, rng), 20)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"QC {qc_pass}/100 pass, uniform {uniform_fail}/100 fail, {elapsed:.1f} s")
    assert qc_pass == 100
    assert uniform_fail == 100
    assert elapsed < 5


@crit(5, "Z divisibility and expectation ceiling")
def test_z_divisibility(record_property):
    t0 = time.perf_counter()
    seeds = np.random.SeedSequence(505).spawn(200)
    perms = [P.build_qc_permutation(P.sample_qc(10, 10, s)) for s in seeds]
    means = {}
    violations = 0
    for m in (2, 3, 4, 5):
        values = np.array([A.count_m_cycling_pairs(p, m, keep_pairs=False).count for p in perms])
        violations += int(np.count_nonzero(values % 10))
        means[m] = values.mean()
    elapsed = time.perf_counter() - t0
    ceilings = {m: m * 3**m / (1 - 1 / 10) for m in means}
    record_property(
        "detail",
        ", ".join(f"M={m} mean {means[m]:.1f} <= {ceilings[m]:.0f}" for m in means) + f", {elapsed:.1f} s",
    )
    assert violations == 0
    assert all(means[m] <= ceilings[m] for m in means)
    assert elapsed < 60


@crit(6, "M-cycling probability bounds")
def test_lemma5_bounds(record_property):
    t0 = time.perf_counter()
    samples = 10_000
    details = []
    ok = True

    def check(label, sampler, r, m, bound, seed):
        nonlocal ok
        frac = A.m_cycling_fraction(sampler, r, m, samples, seed)
        margin = 5 * math.sqrt(bound * (1 - bound) / samples)
        ok &= frac <= bound + margin
        details.append(f"{label} r={r}: {frac:.4f} <= {bound:.4f}+{margin:.4f}")

    # uniform permutations, N = 100, M = 8
    for k, r in enumerate([(1,), (3,), (2, -1, 3), (1, 1, 1, 1, 1)]):
        check("uniform", lambda g: P.sample_uniform(100, g), r, 8, 2 * 8 / 99, 600 + k)
    # quasi-cyclic 10 x 10, M < n2
    qc_sampler = lambda g: P.build_qc_permutation(P.sample_qc(10, 10, g))  # noqa: E731
    for k, (r, m) in enumerate([((1,), 9), ((1,), 8), ((2, 1, -1), 8), ((1, 2, 1, 1, 1), 9)]):
        check(f"qc M={m}", qc_sampler, r, m, 2 * m / (10 * 9), 700 + k)
    elapsed = time.perf_counter() - t0
    record_property("detail", "; ".join(details) + f"; {elapsed:.1f} s")
    assert ok
    assert elapsed < 60


@crit(7, "distance search matches exhaustive oracle")
def test_distance_oracle(record_property):
    t0 = time.perf_counter()
    code = RscCode(0o7, 0o5)
    perms = {
        "identity": P.identity(16),
        "uniform": P.sample_uniform(16, 1),
        "qc": P.build_qc_permutation(P.sample_qc(4, 4, 2)),
    }
    details = []
    ok = True
    for label, perm in perms.items():
        for pattern in ("none", "alternate"):
            tc = TurboCode(code, perm, pattern)
            exact = A.min_distance_exhaustive(tc).value
            search = A.min_distance_low_weight(tc, 16).value
            ok &= exact == search
            details.append(f"{label}/{pattern} {exact}={search}")
    elapsed = time.perf_counter() - t0
    record_property("detail", ", ".join(details) + f", {elapsed:.1f} s")
    assert ok
    assert elapsed < 120


def _posterior_oracle(code, lsys, lpar):
    n = lsys.size
    words = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    par = encode_tail_biting(code, words)
    metric = (0.5 * lsys * (1 - 2.0 * words) + 0.5 * lpar * (1 - 2.0 * par)).sum(axis=1)
    metric -= metric.max()
    weights = np.exp(metric)
    return (weights[:, None] * words).sum(axis=0) / weights.sum()


@crit(8, "tail-biting BCJR matches brute-force posterior")
def test_decoder_oracle(record_property):
    # (7,5) has feedback period 3, so N = 12 admits no tail-biting encoding;
    # the largest admissible length at or below 12 is used.
    t0 = time.perf_counter()
    code = RscCode(0o7, 0o5)
    rng = np.random.default_rng(808)
    worst_exact = 0.0
    worst_wrap = 0.0
    for k in range(20):
        n = 11 if k % 2 == 0 else 10
        sigma = 0.8
        bits = rng.integers(0, 2, n).astype(np.uint8)
        par = encode_tail_biting(code, bits)
        lsys = 2 / sigma**2 * (1 - 2.0 * bits + sigma * rng.standard_normal(n))
        lpar = 2 / sigma**2 * (1 - 2.0 * par + sigma * rng.standard_normal(n))
        oracle = _posterior_oracle(code, lsys, lpar)
        app = bcjr_tail_biting(code.trellis, lsys, lpar, exact=True, return_app=True)
        worst_exact = max(worst_exact, np.max(np.abs(1 / (1 + np.exp(app)) - oracle)))
        wrap = bcjr_tail_biting(code.trellis, lsys, lpar, wraps=8, return_app=True)
        worst_wrap = max(worst_wrap, np.max(np.abs(1 / (1 + np.exp(wrap)) - oracle)))
    elapsed = time.perf_counter() - t0
    record_property(
        "detail", f"exact max |dP| {worst_exact:.1e}, wrap-around max |dP| {worst_wrap:.1e}, {elapsed:.1f} s"
    )
    assert worst_exact < 1e-6
    assert elapsed < 120


@crit(9, "trellis weight inequality fuzz")
def test_lemma2_fuzz(fig1_perm, record_property):
    t0 = time.perf_counter()
    code = RscCode(0o7, 0o5)
    tc = TurboCode(code, fig1_perm, "none")
    lam = lambda_parameter(code)
    assert lam == Fraction(1, 2)
    rng = np.random.default_rng(909)
    violations = 0
    checked = 0
    while checked < 10_000:
        s = (rng.random(25) < rng.uniform(0.02, 0.6)).astype(np.uint8)
        if not s.any():
            continue
        checked += 1
        w = turbo_encode(tc, s).weight
        total = A.trellis_weight(code, s) + A.trellis_weight(code, fig1_perm.interleave(s))
        violations += total > 2 * w / lam
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{checked} inputs, {violations} violations, {elapsed:.1f} s")
    assert violations == 0
    assert elapsed < 30


@crit(10, "quasi-cyclic family beats uniform on low-weight distance")
def test_qc_beats_uniform(record_property):
    t0 = time.perf_counter()
    code = RscCode(0o13, 0o15)
    seeds = np.random.SeedSequence(2024).spawn(20)
    qc = [P.build_qc_permutation(P.sample_qc(20, 20, s)) for s in seeds]
    uni = [P.sample_uniform(400, s) for s in np.random.SeedSequence(4048).spawn(20)]
    details = []
    ok = True
    for pattern in ("none", "alternate"):
        qc_mean = np.mean([A.min_distance_low_weight(TurboCode(code, p, pattern), 3).value for p in qc])
        uni_mean = np.mean([A.min_distance_low_weight(TurboCode(code, p, pattern), 3).value for p in uni])
        ok &= qc_mean > uni_mean
        details.append(f"{pattern}: QC {qc_mean:.2f} vs uniform {uni_mean:.2f}")
    elapsed = time.perf_counter() - t0
    record_property("detail", "; ".join(details) + f", {elapsed:.0f} s")
    assert ok
    assert elapsed < 1800


@crit(11, "simulation sanity")
def test_simulation_sanity(record_property):
    t0 = time.perf_counter()
    details = []
    # uncoded BPSK against Q(sqrt(2 Eb/N0))
    for ebn0 in (0.0, 2.0, 4.0):
        errors, nbits = S.uncoded_bpsk(ebn0, 1_000_000, seed=11 + int(ebn0))
        p = S.q_function(math.sqrt(2 * 10 ** (ebn0 / 10)))
        z = (errors - nbits * p) / math.sqrt(nbits * p * (1 - p))
        details.append(f"uncoded {ebn0:g} dB z={z:+.2f}")
        assert abs(z) <= 3

    # turbo WER over a 1-4 dB sweep; caption stopping rule, frame-capped at desk scale
    tc = TurboCode(RscCode(0o13, 0o15), P.load_table2(), "alternate")
    snrs = (1.0, 1.5, 2.0, 3.0, 4.0)
    config = S.SimConfig(tc, snrs, iterations=32, max_frames=3000, seed=1111)
    points = [S.run_point(config, snr, min_block_errors=30 if snr == snrs[-1] else None) for snr in snrs]
    details.append("WER " + " ".join(f"{p.ebn0_db:g}:{p.block_errors}/{p.frames}" for p in points))
    for a, b in zip(points, points[1:]):
        slack = 3 * math.hypot(a.wer_sigma(), b.wer_sigma())
        assert b.wer <= a.wer + slack, (a, b)

    # worker-count invariance, including a stop in the middle of the run
    kwargs = dict(iterations=32, min_block_errors=4, min_bit_errors=20, max_frames=256, batch_frames=16, seed=7)
    one = S.run(S.SimConfig(tc, (1.0, 1.5), workers=1, **kwargs)).points
    eight = S.run(S.SimConfig(tc, (1.0, 1.5), workers=8, **kwargs)).points
    details.append(f"workers 1 vs 8 identical: {one == eight}")
    assert one == eight
    elapsed = time.perf_counter() - t0
    details.append(f"{elapsed:.0f} s")
    record_property("detail", "; ".join(details))
    assert elapsed < 7200


def _load_recipe():
    spec = importlib.util.spec_from_file_location("reproduce_wer_curves", DEMOS / "reproduce_wer_curves.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@crit(12, "reproduction recipe and archived baselines")
def test_recipe_baselines(record_property):
    recipe = _load_recipe()
    configs = {(r["gens"], r["iterations"]) for r in recipe.RECIPES.values()}
    assert configs == {("13,15", 32), ("37,21", 40)}
    details = []
    for name, r in recipe.RECIPES.items():
        rows = S.read_csv(recipe.baseline_path(name))
        assert [float(row["ebn0_db"]) for row in rows] == list(r["snr"])
        assert recipe.check(name), f"{name} does not reproduce its baseline"
        details.append(f"{name}: {len(rows)} points, first point reproduced")
    record_property("detail", "; ".join(details))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
