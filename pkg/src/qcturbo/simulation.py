"""BPSK / AWGN Monte Carlo estimation of word and bit error rates.

Every frame draws its information bits and noise from its own counter-based
generator keyed by ``(seed, frame_index)``, and frames are processed in
fixed-size batches whose results are merged in index order.  The stopping
rule is evaluated at batch boundaries, so counts do not depend on the number
of worker processes.  Frame ``k`` uses the same bits and unit noise at every
SNR point (common random numbers).
"""

from __future__ import annotations

import csv
import io
import math
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from os import PathLike

import numpy as np

from .errors import ValidationError
from .turbo import TurboCode, depuncture, puncture, turbo_decode, turbo_encode

__all__ = [
    "SimConfig",
    "PointResult",
    "SimResult",
    "bpsk_modulate",
    "awgn",
    "channel_llr",
    "ebn0_to_sigma",
    "q_function",
    "frame_rng",
    "simulate_frames",
    "run_point",
    "run",
    "uncoded_bpsk",
    "format_csv",
    "write_csv",
]

CSV_HEADER = ["ebn0_db", "frames", "block_errors", "bit_errors", "wer", "ber", "censored"]


def bpsk_modulate(bits) -> np.ndarray:
    """Map bit ``b`` to ``1 - 2b``."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def awgn(symbols, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    x = np.asarray(symbols, dtype=np.float64)
    return x + sigma * rng.standard_normal(x.shape)


def channel_llr(noisy, sigma: float) -> np.ndarray:
    """``2 y / sigma^2`` (positive means bit 0)."""
    if sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    return 2.0 * np.asarray(noisy, dtype=np.float64) / (sigma * sigma)


def ebn0_to_sigma(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK at the given Eb/N0 and code rate."""
    if not 0 < rate <= 1:
        raise ValidationError(f"rate must lie in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


def q_function(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def frame_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for frame ``index`` (Philox keyed by the seed)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


@dataclass(frozen=True)
class SimConfig:
    tc: TurboCode
    snr_points: tuple[float, ...]
    iterations: int = 8
    min_block_errors: int = 100
    min_bit_errors: int = 500
    max_frames: int = 10_000_000
    seed: int = 0
    workers: int = 1
    wraps: int = 2
    batch_frames: int = 32
    max_log: bool = False

    def __post_init__(self):
        object.__setattr__(self, "snr_points", tuple(float(v) for v in self.snr_points))
        if not self.snr_points:
            raise ValidationError("snr_points must not be empty")
        if self.min_block_errors < 1:
            raise ValidationError("min_block_errors must be at least 1")
        if self.min_bit_errors < 0:
            raise ValidationError("min_bit_errors must be non-negative")
        if self.iterations < 1:
            raise ValidationError("iterations must be at least 1")
        if self.max_frames < 1 or self.batch_frames < 1 or self.workers < 1:
            raise ValidationError("max_frames, batch_frames and workers must be positive")


@dataclass(frozen=True)
class PointResult:
    ebn0_db: float
    frames: int
    block_errors: int
    bit_errors: int
    n: int
    censored: bool = False
    wall_time: float = field(default=0.0, compare=False)

    @property
    def wer(self) -> float:
        return self.block_errors / self.frames if self.frames else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.n) if self.frames else 0.0

    def wer_sigma(self) -> float:
        """Binomial standard error of the WER estimate."""
        p = self.wer
        return math.sqrt(max(p * (1 - p), 0.0) / self.frames) if self.frames else 0.0


@dataclass
class SimResult:
    points: list[PointResult]

    def to_csv(self) -> str:
        return format_csv(self.points)


def simulate_frames(
    tc: TurboCode,
    sigma: float,
    iterations: int,
    seed: int,
    start: int,
    count: int,
    wraps: int = 2,
    max_log: bool = False,
) -> tuple[int, int, int]:
    """Encode, transmit and decode frames ``start .. start+count-1``.

    Returns ``(frames, block_errors, bit_errors)``.
    """
    n = tc.n
    block_errors = 0
    bit_errors = 0
    for index in range(start, start + count):
        rng = frame_rng(seed, index)
        bits = rng.integers(0, 2, n, dtype=np.uint8)
        symbols = bpsk_modulate(puncture(turbo_encode(tc, bits), tc.puncture))
        received = awgn(symbols, sigma, rng)
        frame = depuncture(channel_llr(received, sigma), n, tc.puncture)
        decoded = turbo_decode(tc, frame, iterations, wraps, max_log=max_log).bits
        errors = int(np.count_nonzero(decoded != bits))
        bit_errors += errors
        block_errors += errors > 0
    return count, block_errors, bit_errors


def _batches(config: SimConfig):
    start = 0
    while start < config.max_frames:
        count = min(config.batch_frames, config.max_frames - start)
        yield start, count
        start += count


def run_point(
    config: SimConfig,
    ebn0_db: float,
    *,
    sigma: float | None = None,
    min_block_errors: int | None = None,
    min_bit_errors: int | None = None,
) -> PointResult:
    """Simulate one Eb/N0 point until the stopping rule or ``max_frames``.

    The stopping rule needs both ``min_block_errors`` block errors and
    ``min_bit_errors`` bit errors.  A point that hits ``max_frames`` first is
    flagged ``censored``.  ``sigma`` overrides the noise level derived from
    ``ebn0_db``.
    """
    tc = config.tc
    sig = ebn0_to_sigma(ebn0_db, tc.rate) if sigma is None else float(sigma)
    need_blocks = config.min_block_errors if min_block_errors is None else min_block_errors
    need_bits = config.min_bit_errors if min_bit_errors is None else min_bit_errors
    args = (tc, sig, config.iterations, config.seed)
    extra = (config.wraps, config.max_log)
    frames = blocks = bits = 0
    done = False
    t0 = time.perf_counter()

    def absorb(result):
        nonlocal frames, blocks, bits, done
        frames += result[0]
        blocks += result[1]
        bits += result[2]
        done = blocks >= need_blocks and bits >= need_bits

    if config.workers == 1:
        for start, count in _batches(config):
            absorb(simulate_frames(*args, start, count, *extra))
            if done:
                break
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            pending = deque()
            jobs = _batches(config)
            for start, count in jobs:
                pending.append(pool.submit(simulate_frames, *args, start, count, *extra))
                if len(pending) >= 2 * config.workers:
                    break
            while pending:
                absorb(pending.popleft().result())
                if done:
                    for fut in pending:
                        fut.cancel()
                    break
                nxt = next(jobs, None)
                if nxt is not None:
                    pending.append(pool.submit(simulate_frames, *args, *nxt, *extra))
    return PointResult(
        ebn0_db=float(ebn0_db),
        frames=frames,
        block_errors=blocks,
        bit_errors=bits,
        n=tc.n,
        censored=not done,
        wall_time=time.perf_counter() - t0,
    )


def run(config: SimConfig) -> SimResult:
    return SimResult([run_point(config, snr) for snr in config.snr_points])


def uncoded_bpsk(ebn0_db: float, nbits: int, seed: int = 0) -> tuple[int, int]:
    """Bit errors of uncoded BPSK over AWGN; returns ``(errors, nbits)``."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))
    sigma = ebn0_to_sigma(ebn0_db, 1.0)
    bits = rng.integers(0, 2, nbits, dtype=np.uint8)
    llr = channel_llr(awgn(bpsk_modulate(bits), sigma, rng), sigma)
    return int(np.count_nonzero((llr < 0) != bits.astype(bool))), nbits


def format_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in points:
        writer.writerow(
            [f"{p.ebn0_db:g}", p.frames, p.block_errors, p.bit_errors,
             f"{p.wer:.5e}", f"{p.ber:.5e}", int(p.censored)]
        )
    return buf.getvalue()


def write_csv(points, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(points))


def read_csv(path: str | PathLike) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
