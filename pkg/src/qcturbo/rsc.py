"""Rate-1/2 recursive systematic convolutional (RSC) constituent codes.

Generators are given in octal as ``(feedback, feedforward)``, e.g. ``(13, 15)``
for ``1 + D^2 + D^3`` over ``1 + D + D^3``.  The most significant bit of the
``nu + 1`` bit word is the coefficient of ``D^0``.

The encoder is realized in controller canonical form.  With feedback register
contents ``w_t = u_t + sum_k f_k w_{t-k}``, the state at time ``t`` packs
``w_{t-1}, ..., w_{t-nu}`` with the most recent value in the least significant
bit, and the parity is ``p_t = sum_k g_k w_{t-k}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from . import _kernels
from .errors import InconclusiveError, TailBitingError, ValidationError

__all__ = [
    "RscCode",
    "Trellis",
    "ErrorEvent",
    "parse_generators",
    "build_trellis",
    "state_matrix",
    "feedback_period",
    "encode_zero_terminated",
    "encode_from_state",
    "tail_biting_initial_state",
    "tail_biting_initial_state_bruteforce",
    "encode_tail_biting",
    "state_path",
    "error_events",
    "lambda_parameter",
    "lambda_by_enumeration",
    "events_best_ratio",
]


def parse_generators(text: str) -> tuple[int, int]:
    """Parse ``"13,15"`` (octal digits) into a pair of integers."""
    parts = [p.strip() for p in text.replace("(", "").replace(")", "").split(",")]
    if len(parts) != 2 or not all(parts):
        raise ValidationError(f"expected two octal generators like '13,15', got {text!r}")
    try:
        return int(parts[0], 8), int(parts[1], 8)
    except ValueError as exc:
        raise ValidationError(f"generators must be octal: {text!r}") from exc


@dataclass(frozen=True)
class RscCode:
    """Octal generator pair; ``feedback`` and ``feedforward`` are plain ints."""

    feedback: int
    feedforward: int

    def __post_init__(self):
        fb, ff = self.feedback, self.feedforward
        if fb <= 0 or ff <= 0:
            raise ValidationError("generators must be positive")
        nu = max(fb, ff).bit_length() - 1
        if nu < 1:
            raise ValidationError("memory must be at least 1")
        if fb.bit_length() != nu + 1 or not fb & 1:
            raise ValidationError(
                f"feedback {fb:o} must have both its constant and degree-{nu} terms set"
            )

    @classmethod
    def from_octal(cls, text: str) -> "RscCode":
        return cls(*parse_generators(text))

    def __str__(self):
        return f"({self.feedback:o},{self.feedforward:o})"

    @property
    def memory(self) -> int:
        return max(self.feedback, self.feedforward).bit_length() - 1

    @property
    def num_states(self) -> int:
        return 1 << self.memory

    def taps(self, generator: int) -> tuple[int, ...]:
        """Coefficients of ``D^0 .. D^nu``."""
        nu = self.memory
        return tuple((generator >> (nu - k)) & 1 for k in range(nu + 1))

    @cached_property
    def trellis(self) -> "Trellis":
        return build_trellis(self)


@dataclass(frozen=True, eq=False)
class Trellis:
    """Transition tables indexed by ``[state, input bit]``."""

    next_state: np.ndarray
    parity_out: np.ndarray

    @property
    def num_states(self) -> int:
        return self.next_state.shape[0]


def build_trellis(code: RscCode) -> Trellis:
    nu = code.memory
    f = code.taps(code.feedback)
    g = code.taps(code.feedforward)
    ns = code.num_states
    nxt = np.empty((ns, 2), np.int64)
    par = np.empty((ns, 2), np.uint8)
    for s in range(ns):
        past = [(s >> (k - 1)) & 1 for k in range(1, nu + 1)]
        fb = sum(f[k] * past[k - 1] for k in range(1, nu + 1)) & 1
        for u in (0, 1):
            w = u ^ fb
            p = (g[0] * w + sum(g[k] * past[k - 1] for k in range(1, nu + 1))) & 1
            nxt[s, u] = ((s << 1) | w) & (ns - 1)
            par[s, u] = p
    nxt.flags.writeable = False
    par.flags.writeable = False
    return Trellis(nxt, par)


# -- GF(2) linear algebra on the state space -----------------------------------


def state_matrix(code: RscCode) -> np.ndarray:
    """Matrix ``A`` with ``state_{t+1} = A state_t`` under zero input (bit k = state bit k)."""
    nu = code.memory
    nxt = code.trellis.next_state
    a = np.zeros((nu, nu), np.uint8)
    for col in range(nu):
        image = nxt[1 << col, 0]
        for row in range(nu):
            a[row, col] = (image >> row) & 1
    return a


def _gf2_matmul(a, b):
    return (a.astype(np.int64) @ b.astype(np.int64) % 2).astype(np.uint8)


def _gf2_matpow(a, e):
    result = np.eye(a.shape[0], dtype=np.uint8)
    base = a.copy()
    while e:
        if e & 1:
            result = _gf2_matmul(result, base)
        base = _gf2_matmul(base, base)
        e >>= 1
    return result


def _gf2_inverse(m):
    """Gauss-Jordan inverse over GF(2); ``None`` when singular."""
    n = m.shape[0]
    aug = np.concatenate([m.astype(np.uint8) % 2, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        pivots = np.nonzero(aug[col:, col])[0]
        if pivots.size == 0:
            return None
        p = col + pivots[0]
        if p != col:
            aug[[col, p]] = aug[[p, col]]
        rows = np.nonzero(aug[:, col])[0]
        for r in rows:
            if r != col:
                aug[r] ^= aug[col]
    return aug[:, n:]


def feedback_period(code: RscCode) -> int:
    """Smallest ``p >= 1`` with ``A^p = I``, or 0 if the state map is not invertible."""
    a = state_matrix(code)
    eye = np.eye(a.shape[0], dtype=np.uint8)
    m = a.copy()
    for p in range(1, 1 << code.memory + 1):
        if np.array_equal(m, eye):
            return p
        m = _gf2_matmul(m, a)
    return 0


def _vec(state, nu):
    return np.array([(state >> k) & 1 for k in range(nu)], np.uint8)


def _int(vec):
    return int(sum(int(b) << k for k, b in enumerate(vec)))


@lru_cache(maxsize=64)
def _tail_biting_map(code: RscCode, n: int) -> np.ndarray:
    """``table[z] = s0`` solving ``(I + A^n) s0 = z`` for every zero-state end state ``z``."""
    nu = code.memory
    a_n = _gf2_matpow(state_matrix(code), n)
    inv = _gf2_inverse(np.eye(nu, dtype=np.uint8) ^ a_n)
    if inv is None:
        raise TailBitingError(
            f"tail-biting is impossible for code {code} at N={n}: I + A^N is singular "
            f"(feedback period {feedback_period(code)}); choose another block length"
        )
    table = np.array([_int(_gf2_matmul(inv, _vec(z, nu)[:, None])[:, 0]) for z in range(code.num_states)])
    table.flags.writeable = False
    return table


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValidationError("bits must be 0 or 1")
    return arr


def encode_from_state(code: RscCode, bits, start) -> tuple[np.ndarray, np.ndarray]:
    """Run the encoder from ``start``; returns ``(parity, final_state)``, batched over rows."""
    arr = _as_bits(bits)
    single = arr.ndim == 1
    arr2 = np.ascontiguousarray(np.atleast_2d(arr))
    starts = np.broadcast_to(np.asarray(start, dtype=np.int64), (arr2.shape[0],)).copy()
    tr = code.trellis
    par, final = _kernels.run_trellis(tr.next_state, tr.parity_out, arr2, starts)
    if single:
        return par[0], final[0]
    return par, final


def encode_zero_terminated(code: RscCode, bits) -> tuple[np.ndarray, np.ndarray]:
    """Encode from state 0 and flush back to state 0.

    Returns ``(parity, tail)`` where ``parity`` has length ``N + nu`` (the last
    ``nu`` parity bits belong to the tail) and ``tail`` holds the ``nu``
    flushing input bits.
    """
    arr = _as_bits(bits).reshape(-1)
    par, state = encode_from_state(code, arr, 0)
    nu = code.memory
    f = code.taps(code.feedback)
    tr = code.trellis
    tail = np.empty(nu, np.uint8)
    tail_par = np.empty(nu, np.uint8)
    s = int(state)
    for k in range(nu):
        u = sum(f[j] * ((s >> (j - 1)) & 1) for j in range(1, nu + 1)) & 1
        tail[k] = u
        tail_par[k] = tr.parity_out[s, u]
        s = int(tr.next_state[s, u])
    assert s == 0
    return np.concatenate([par, tail_par]), tail


def tail_biting_initial_state(code: RscCode, bits):
    """Circular starting state: encoding ``bits`` from it ends in the same state.

    Batched over rows of a 2-D ``bits`` array.
    """
    arr = _as_bits(bits)
    n = arr.shape[-1]
    table = _tail_biting_map(code, n)
    _, z = encode_from_state(code, arr, 0)
    return table[z] if np.ndim(z) else int(table[int(z)])


def tail_biting_initial_state_bruteforce(code: RscCode, bits) -> int:
    """Try every starting state; return the unique one that closes the circle."""
    arr = _as_bits(bits).reshape(-1)
    closing = []
    for s in range(code.num_states):
        _, final = encode_from_state(code, arr, s)
        if int(final) == s:
            closing.append(s)
    if len(closing) != 1:
        raise TailBitingError(f"{len(closing)} closing states for N={arr.size}")
    return closing[0]


def encode_tail_biting(code: RscCode, bits) -> np.ndarray:
    """Circular encoding; output has exactly ``N`` parity bits per row."""
    arr = _as_bits(bits)
    s0 = tail_biting_initial_state(code, arr)
    par, final = encode_from_state(code, arr, s0)
    assert np.array_equal(np.asarray(final), np.asarray(s0))
    return par


def state_path(code: RscCode, bits, start=None) -> np.ndarray:
    """States ``S_0 .. S_N`` visited while encoding ``bits`` (tail-biting by default)."""
    arr = np.ascontiguousarray(_as_bits(bits).reshape(-1))
    if start is None:
        start = tail_biting_initial_state(code, arr)
    return _kernels.trellis_states(code.trellis.next_state, arr, int(start))


# -- error events --------------------------------------------------------------


@dataclass(frozen=True)
class ErrorEvent:
    """Maximal circular interval ``[start, end]`` where the path leaves state 0.

    ``length`` is the arc length ``(end - start) mod N``; an event that covers
    the whole circle (the path never rests in state 0) has ``length == N``
    and ``full_circle`` set.
    """

    start: int
    end: int
    length: int
    input_weight: int
    output_weight: int
    full_circle: bool = False

    def positions(self, n: int) -> np.ndarray:
        count = n if self.full_circle else self.length + 1
        return (self.start + np.arange(count)) % n


def error_events(code: RscCode, bits) -> list[ErrorEvent]:
    """Decompose the circular trellis path of ``bits`` into simple error events."""
    arr = _as_bits(bits).reshape(-1)
    n = arr.size
    if not arr.any():
        return []
    states = state_path(code, arr)
    par = encode_tail_biting(code, arr)
    out = arr.astype(np.int64) + par
    resting = (states[:-1] == 0) & (states[1:] == 0)
    if not resting.any():
        return [ErrorEvent(0, n - 1, n, int(arr.sum()), int(out.sum()), full_circle=True)]
    # rotate so that position 0 rests in state 0, then scan runs linearly
    origin = int(np.argmax(resting))
    rolled = np.roll(~resting, -origin)
    events = []
    t = 0
    while t < n:
        if rolled[t]:
            a = t
            while t < n and rolled[t]:
                t += 1
            b = t - 1
            idx = (np.arange(a, b + 1) + origin) % n
            events.append(
                ErrorEvent(
                    start=(a + origin) % n,
                    end=(b + origin) % n,
                    length=b - a,
                    input_weight=int(arr[idx].sum()),
                    output_weight=int(out[idx].sum()),
                )
            )
        else:
            t += 1
    events.sort(key=lambda e: e.start)
    return events


# -- lambda --------------------------------------------------------------------


def _event_graph(code: RscCode):
    """Arcs ``(u, v, weight, duration)`` whose cycles are error events or nonzero cycles.

    State 0 is split: node 0 is the departure side and node ``S`` the return
    side.  The arc ``S -> 0`` has duration -1, so a cycle through it made of
    ``T`` trellis transitions has duration ``T - 1``: the arc length of the
    event it represents.
    """
    tr = code.trellis
    ns = tr.num_states
    arcs = []
    for u in range(ns):
        for b in (0, 1):
            v = int(tr.next_state[u, b])
            if u == 0 and v == 0:
                continue
            w = b + int(tr.parity_out[u, b])
            arcs.append((u, ns if v == 0 else v, w, 1))
    arcs.append((ns, 0, 0, -1))
    return ns + 1, arcs


def _closed_walk_minima(nodes, arcs, q):
    inf = None
    dist = [[inf] * nodes for _ in range(nodes)]
    for u, v, w, t in arcs:
        c = w - q * t
        if dist[u][v] is None or c < dist[u][v]:
            dist[u][v] = c
    for k in range(nodes):
        dk = dist[k]
        for i in range(nodes):
            dik = dist[i][k]
            if dik is None:
                continue
            di = dist[i]
            for j in range(nodes):
                if dk[j] is None:
                    continue
                c = dik + dk[j]
                if di[j] is None or c < di[j]:
                    di[j] = c
    return [dist[i][i] for i in range(nodes)]


def _feasible(nodes, arcs, q) -> bool:
    return all(d is None or d >= 0 for d in _closed_walk_minima(nodes, arcs, q))


def lambda_parameter(code: RscCode, search_horizon: int | None = None) -> Fraction:
    """Minimal ratio of output weight to arc length over simple error events.

    Computed as a minimum-ratio cycle problem: bisection on the ratio with
    negative-cycle detection, snapped to the unique rational with denominator
    at most ``num_states`` and certified in exact arithmetic.  The certified
    value is also the infimum over all codewords, since weights and lengths
    add over events.  ``search_horizon`` bounds the length of the tight cycle
    accepted as certificate.
    """
    ns = code.num_states
    horizon = 4 * ns if search_horizon is None else search_horizon
    if horizon < 4 * ns:
        raise InconclusiveError(f"search_horizon={horizon} < 4 * num_states = {4 * ns}")
    nodes, arcs = _event_graph(code)
    max_den = ns
    lo, hi = 0.0, 2.0
    while hi - lo > 1.0 / (4 * max_den * max_den):
        mid = 0.5 * (lo + hi)
        if _feasible(nodes, arcs, mid):
            lo = mid
        else:
            hi = mid
    q = Fraction((lo + hi) / 2).limit_denominator(max_den)
    minima = _closed_walk_minima(nodes, arcs, q)
    if any(d is not None and d < 0 for d in minima) or not any(d == 0 for d in minima):
        raise InconclusiveError(f"could not certify lambda near {q} for code {code}")
    cycle = _tight_cycle(nodes, arcs, q)
    if cycle is None or len(cycle) > horizon:
        raise InconclusiveError(f"no tight cycle within horizon {horizon}")
    return q


def _tight_cycle(nodes, arcs, q):
    """Arcs of one zero-weight cycle under costs ``w - q t`` (Bellman-Ford from a tight node)."""
    minima = _closed_walk_minima(nodes, arcs, q)
    for root in range(nodes):
        if minima[root] != 0:
            continue
        # shortest walks root -> v, then close the walk along a tight arc back to root
        dist = {root: Fraction(0)}
        pred = {root: None}
        for _ in range(nodes):
            for u, v, w, t in arcs:
                if u in dist and v != root:
                    c = dist[u] + w - q * t
                    if v not in dist or c < dist[v]:
                        dist[v] = c
                        pred[v] = (u, v, w, t)
        for arc in arcs:
            u, v, w, t = arc
            if v == root and u in dist and dist[u] + w - q * t == 0:
                path = [arc]
                node = u
                while pred[node] is not None:
                    path.append(pred[node])
                    node = pred[node][0]
                return path[::-1]
    return None


def _elementary_cycle_means(code: RscCode):
    """Mean output weight of every elementary cycle that avoids state 0 (DFS enumeration)."""
    tr = code.trellis
    ns = tr.num_states
    means = []

    def dfs(root, node, weight, length, seen):
        for b in (0, 1):
            v = int(tr.next_state[node, b])
            w = weight + b + int(tr.parity_out[node, b])
            if v == root:
                means.append(Fraction(w, length + 1))
            elif v > root and v not in seen:
                seen.add(v)
                dfs(root, v, w, length + 1, seen)
                seen.discard(v)

    for root in range(1, ns):
        dfs(root, root, 0, 0, {root})
    return means


def lambda_by_enumeration(code: RscCode, max_length: int = 40) -> Fraction:
    """Independent oracle for :func:`lambda_parameter`.

    Takes the smaller of (a) the best ratio over all events with at most
    ``max_length`` transitions, exhausted by dynamic programming over path
    length, and (b) the best mean over elementary cycles that never visit
    state 0, found by depth-first enumeration.  Long events that wind around
    such a cycle have ratios tending to its mean, so (b) covers the events
    beyond the horizon.
    """
    best = min(_elementary_cycle_means(code), default=None)
    short = events_best_ratio(code, max_length)
    if short is not None and (best is None or short[0] < best):
        best = short[0]
    if best is None:
        raise InconclusiveError(f"no event closes within {max_length} transitions")
    return best


def events_best_ratio(code: RscCode, max_length: int) -> tuple[Fraction, int] | None:
    """Best ``weight / (transitions - 1)`` over events of at most ``max_length`` transitions."""
    tr = code.trellis
    ns = tr.num_states
    inf = 1 << 30
    cur = np.full(ns, inf, dtype=np.int64)
    cur[int(tr.next_state[0, 1])] = 1 + int(tr.parity_out[0, 1])
    best = None
    for length in range(2, max_length + 1):
        nxt = np.full(ns, inf, dtype=np.int64)
        closed = inf
        for s in range(1, ns):
            if cur[s] >= inf:
                continue
            for b in (0, 1):
                v = int(tr.next_state[s, b])
                w = cur[s] + b + int(tr.parity_out[s, b])
                if v == 0:
                    closed = min(closed, w)
                elif w < nxt[v]:
                    nxt[v] = w
        if closed < inf:
            ratio = Fraction(int(closed), length - 1)
            if best is None or ratio < best[0]:
                best = (ratio, length)
        cur = nxt
    return best
