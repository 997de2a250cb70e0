"""Parallel turbo code: two RSC branches joined by an interleaver.

The first branch encodes ``s``; the second encodes ``s[pi(0)], ..., s[pi(N-1)]``.
Both branches are tail-biting by default, so the code is quasi-cyclic when
the interleaver is.  Alternate puncturing keeps all systematic bits and
sends ``parity1`` at even and ``parity2`` at odd times (rate 1/2).

LLRs follow the convention ``LLR > 0`` means bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import _kernels
from .errors import ValidationError
from .permutation import Permutation
from .rsc import RscCode, Trellis, _tail_biting_map, encode_from_state, encode_tail_biting

__all__ = [
    "TurboCode",
    "TurboCodeword",
    "LlrFrame",
    "DecodeResult",
    "turbo_encode",
    "puncture",
    "puncture_mask",
    "depuncture",
    "bcjr_tail_biting",
    "turbo_decode",
]

Puncture = Literal["none", "alternate"]
Termination = Literal["tail_biting", "open"]


@dataclass(frozen=True, eq=False)
class TurboCode:
    """Shared constituent ``code``, interleaver ``perm`` and puncturing pattern.

    ``termination="open"`` starts both encoders in state 0 and leaves the end
    state free; it exists for block lengths where tail-biting is impossible.
    """

    code: RscCode
    perm: Permutation
    puncture: Puncture = "alternate"
    termination: Termination = "tail_biting"

    def __post_init__(self):
        if self.puncture not in ("none", "alternate"):
            raise ValidationError(f"unknown puncturing pattern {self.puncture!r}")
        if self.termination not in ("tail_biting", "open"):
            raise ValidationError(f"unknown termination {self.termination!r}")
        if self.termination == "tail_biting":
            _tail_biting_map(self.code, self.perm.n)

    @property
    def n(self) -> int:
        return self.perm.n

    @property
    def transmitted_length(self) -> int:
        return 3 * self.n if self.puncture == "none" else 2 * self.n

    @property
    def rate(self) -> float:
        return self.n / self.transmitted_length


@dataclass(frozen=True)
class TurboCodeword:
    systematic: np.ndarray
    parity1: np.ndarray
    parity2: np.ndarray
    punctured_length: int

    @property
    def weight(self) -> int:
        """Hamming weight of the unpunctured (rate 1/3) codeword."""
        return int(self.systematic.sum()) + int(self.parity1.sum()) + int(self.parity2.sum())


@dataclass
class LlrFrame:
    channel_sys: np.ndarray
    channel_p1: np.ndarray
    channel_p2: np.ndarray
    extrinsic: np.ndarray = None

    def __post_init__(self):
        self.channel_sys = np.asarray(self.channel_sys, dtype=np.float64)
        self.channel_p1 = np.asarray(self.channel_p1, dtype=np.float64)
        self.channel_p2 = np.asarray(self.channel_p2, dtype=np.float64)
        n = self.channel_sys.size
        if self.extrinsic is None:
            self.extrinsic = np.zeros(n)
        self.extrinsic = np.asarray(self.extrinsic, dtype=np.float64)
        if not (self.channel_p1.size == self.channel_p2.size == self.extrinsic.size == n):
            raise ValidationError("LLR streams have different lengths")
        for arr in (self.channel_sys, self.channel_p1, self.channel_p2, self.extrinsic):
            if not np.isfinite(arr).all():
                raise FloatingPointError("non-finite LLR in frame")


def _encode_branch(tc: TurboCode, bits):
    if tc.termination == "tail_biting":
        return encode_tail_biting(tc.code, bits)
    par, _ = encode_from_state(tc.code, bits, 0)
    return par


def turbo_encode(tc: TurboCode, s) -> TurboCodeword:
    """Encode one information word (or a batch, one word per row)."""
    bits = np.asarray(s, dtype=np.uint8)
    if bits.shape[-1] != tc.n:
        raise ValidationError(f"information word has length {bits.shape[-1]}, expected N={tc.n}")
    p1 = _encode_branch(tc, bits)
    p2 = _encode_branch(tc, tc.perm.interleave(bits))
    return TurboCodeword(bits.copy(), p1, p2, tc.transmitted_length)


def puncture_mask(n: int, pattern: Puncture = "alternate") -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks of the transmitted positions of ``parity1`` and ``parity2``."""
    if pattern == "none":
        return np.ones(n, bool), np.ones(n, bool)
    if pattern == "alternate":
        even = np.arange(n) % 2 == 0
        return even, ~even
    raise ValidationError(f"unknown puncturing pattern {pattern!r}")


def puncture(cw: TurboCodeword, pattern: Puncture = "alternate") -> np.ndarray:
    """Serialize to the transmitted symbol order: systematic block, then parity block.

    Unpunctured: ``sys | parity1 | parity2``.  Alternate: ``sys | q`` with
    ``q[t] = parity1[t]`` for even ``t`` and ``parity2[t]`` for odd ``t``.
    Works row-wise on batches.
    """
    n = cw.systematic.shape[-1]
    if cw.parity1.shape[-1] != n or cw.parity2.shape[-1] != n:
        raise ValidationError("codeword streams have different lengths")
    if pattern == "none":
        return np.concatenate([cw.systematic, cw.parity1, cw.parity2], axis=-1)
    m1, _ = puncture_mask(n, pattern)
    merged = np.where(m1, cw.parity1, cw.parity2)
    return np.concatenate([cw.systematic, merged], axis=-1)


def depuncture(symbols, n: int, pattern: Puncture = "alternate") -> LlrFrame:
    """Inverse of :func:`puncture` on LLRs; removed positions receive 0."""
    y = np.asarray(symbols, dtype=np.float64)
    expected = 3 * n if pattern == "none" else 2 * n
    if y.size != expected:
        raise ValidationError(f"got {y.size} symbols, expected {expected} for N={n} ({pattern})")
    sys = y[:n].copy()
    if pattern == "none":
        return LlrFrame(sys, y[n:2 * n].copy(), y[2 * n:].copy())
    m1, m2 = puncture_mask(n, pattern)
    q = y[n:]
    return LlrFrame(sys, np.where(m1, q, 0.0), np.where(m2, q, 0.0))


def _check_finite(*arrays):
    for a in arrays:
        if not np.isfinite(a).all():
            raise FloatingPointError("non-finite LLR input")


def bcjr_tail_biting(
    trellis: Trellis,
    llr_sys,
    llr_par,
    prior=None,
    wraps: int = 2,
    *,
    exact: bool = False,
    max_log: bool = False,
    open_start: bool = False,
    return_app: bool = False,
):
    """Log-domain forward-backward pass over one constituent trellis.

    Returns the extrinsic LLRs (a-posteriori minus prior minus systematic
    channel term), or the a-posteriori LLRs with ``return_app=True``.

    By default the circular trellis is handled by wrap-around message passing:
    metrics start uniform and are carried around the circle ``wraps`` times.
    ``exact=True`` instead sums one forward/backward run per common start and
    end state, which yields the exact tail-biting posterior at ``num_states``
    times the cost.
    """
    lsys = np.ascontiguousarray(llr_sys, dtype=np.float64)
    lpar = np.ascontiguousarray(llr_par, dtype=np.float64)
    la = np.zeros_like(lsys) if prior is None else np.ascontiguousarray(prior, dtype=np.float64)
    if wraps < 1:
        raise ValidationError("wraps must be at least 1")
    if not lsys.shape == lpar.shape == la.shape:
        raise ValidationError("LLR arrays have different shapes")
    _check_finite(lsys, lpar, la)
    if exact:
        app = _kernels.bcjr_exact_circular(trellis.next_state, trellis.parity_out, lsys, lpar, la, max_log)
    else:
        app = _kernels.bcjr(trellis.next_state, trellis.parity_out, lsys, lpar, la, wraps, open_start, max_log)
    if return_app:
        return app
    return app - lsys - la


@dataclass(frozen=True)
class DecodeResult:
    """Hard decisions plus a per-iteration trace.

    ``flips[k]`` counts decisions that changed in iteration ``k`` (against
    all-zero before the first) and ``mean_abs_llr[k]`` is the mean magnitude
    of the a-posteriori LLRs after it.
    """

    bits: np.ndarray
    app: np.ndarray
    flips: np.ndarray = field(repr=False)
    mean_abs_llr: np.ndarray = field(repr=False)

    def __iter__(self):
        # unpacks as (decisions, trace)
        yield self.bits
        yield list(zip(self.flips.tolist(), self.mean_abs_llr.tolist()))


def turbo_decode(
    tc: TurboCode,
    frame: LlrFrame,
    iterations: int = 8,
    wraps: int = 2,
    *,
    max_log: bool = False,
) -> DecodeResult:
    """Iterative decoding exchanging clamped extrinsic LLRs through the interleaver."""
    if iterations < 1:
        raise ValidationError("iterations must be at least 1")
    if wraps < 1:
        raise ValidationError("wraps must be at least 1")
    if frame.channel_sys.size != tc.n:
        raise ValidationError(f"frame length {frame.channel_sys.size} != N={tc.n}")
    tr = tc.code.trellis
    bits, app, flips, mean_abs = _kernels.turbo_decode(
        tr.next_state,
        tr.parity_out,
        tc.perm.table,
        tc.perm.inverse,
        np.ascontiguousarray(frame.channel_sys),
        np.ascontiguousarray(frame.channel_p1),
        np.ascontiguousarray(frame.channel_p2),
        np.ascontiguousarray(frame.extrinsic),
        iterations,
        wraps,
        tc.termination == "open",
        max_log,
    )
    return DecodeResult(bits, app, flips, mean_abs)
