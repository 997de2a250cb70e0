"""Minimum-distance machinery: chains, pi-weight, M-cycling and distance search.

A chain is generated by an odd-length sequence ``r`` of nonzero residues and a
start ``x0``.  Its elements alternate between the natural and interleaved
orders::

    y[i] = pi(x[i])
    y[2i+1] = y[2i] + r[2i+1]          (mod N)
    x[2i]   = x[2i-1] + r[2i]          (mod N)

and its pi-weight is ``||r|| + d(x0, x_l)`` where ``d`` is the circular
distance and ``||r||`` sums minimal absolute residues.  Small pi-weight chains
are necessary for low-weight turbo codewords: a codeword of weight ``w``
forces a chain of distinct elements with pi-weight at most ``2 w / lambda``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import _kernels
from .errors import ResourceLimitError, ValidationError
from .permutation import Permutation, build_qc_permutation, sample_qc
from .rsc import RscCode, error_events
from .turbo import TurboCode, puncture_mask, turbo_encode

__all__ = [
    "Chain",
    "CyclingCount",
    "ZStatistics",
    "DistanceReport",
    "circular_distance",
    "min_abs_residue",
    "build_chain",
    "pi_weight_of_sequence",
    "m_cycles_at",
    "nonzero_sequences",
    "candidate_count",
    "count_m_cycling_pairs",
    "z_statistics",
    "m_cycling_fraction",
    "trellis_weight",
    "codeword_weight",
    "min_distance_exhaustive",
    "min_distance_low_weight",
    "chain_from_codeword",
]


def circular_distance(x, y, n: int):
    """Smallest ``d >= 0`` with ``x + d = y`` or ``x - d = y`` modulo ``n`` (vectorized)."""
    diff = np.mod(np.asarray(y) - np.asarray(x), n)
    out = np.minimum(diff, n - diff)
    return int(out) if out.ndim == 0 else out


def min_abs_residue(r: int, n: int) -> int:
    """``|r|`` as the smallest absolute value of an integer congruent to ``r`` mod ``n``."""
    r %= n
    return min(r, n - r)


@dataclass(frozen=True)
class Chain:
    r: tuple[int, ...]
    x0: int
    x: tuple[int, ...]
    y: tuple[int, ...]
    pi_weight: int
    n: int

    @property
    def length(self) -> int:
        """Number of steps ``l`` (odd)."""
        return len(self.r)

    @property
    def norm(self) -> int:
        return sum(min_abs_residue(v, self.n) for v in self.r)

    def is_distinct(self) -> bool:
        return len(set(self.x)) == len(self.x)


def _check_r(r, n):
    if len(r) % 2 == 0:
        raise ValidationError(f"r must have odd length, got {len(r)}")
    if any(v % n == 0 for v in r):
        raise ValidationError("every r_i must be nonzero modulo N")


def build_chain(perm: Permutation, r, x0: int) -> Chain:
    n = perm.n
    r = tuple(int(v) for v in r)
    _check_r(r, n)
    if not 0 <= x0 < n:
        raise ValidationError(f"x0={x0} outside [0, {n})")
    xs = [int(x0)]
    ys = [int(perm.table[x0])]
    for i, step in enumerate(r, start=1):
        if i % 2:
            y = (ys[-1] + step) % n
            xs.append(int(perm.inverse[y]))
            ys.append(y)
        else:
            x = (xs[-1] + step) % n
            xs.append(x)
            ys.append(int(perm.table[x]))
    weight = sum(min_abs_residue(v, n) for v in r) + circular_distance(xs[0], xs[-1], n)
    return Chain(r, int(x0), tuple(xs), tuple(ys), int(weight), n)


def pi_weight_of_sequence(perm: Permutation, x) -> int:
    """pi-weight of an even-numbered sequence straight from the pairwise distances.

    Sums ``d(x[2i-1], x[2i])``, ``d(x[0], x[l])`` and ``d(y[2i], y[2i+1])``.
    """
    n = perm.n
    x = [int(v) for v in x]
    if len(x) % 2:
        raise ValidationError("sequence must have an even number of elements")
    y = [int(perm.table[v]) for v in x]
    ell = len(x) - 1
    total = circular_distance(x[0], x[ell], n)
    total += sum(circular_distance(x[2 * i - 1], x[2 * i], n) for i in range(1, (ell + 1) // 2))
    total += sum(circular_distance(y[2 * i], y[2 * i + 1], n) for i in range((ell + 1) // 2))
    return int(total)


def m_cycles_at(perm: Permutation, r, x0: int, m: int) -> bool:
    return build_chain(perm, r, x0).pi_weight <= m


# -- enumeration of M-cycling pairs ----------------------------------------------


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Positive compositions of ``total`` into ``parts`` summands, lexicographic."""
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[k + 1] - bounds[k] for k in range(parts))


def nonzero_sequences(m: int, n: int) -> Iterator[tuple[int, ...]]:
    """Every residue sequence ``r`` of odd length with nonzero terms and ``||r|| < m``.

    Ordered by norm, then length, then magnitudes, then sign pattern
    (``+`` before ``-``).  A magnitude of exactly ``n / 2`` is one residue and
    is produced once.
    """
    half = n // 2
    for norm in range(1, m):
        for ell in range(1, norm + 1, 2):
            for mags in _compositions(norm, ell):
                if any(a > half for a in mags):
                    continue
                choices = [(a,) if 2 * a == n else (a, -a) for a in mags]
                yield from itertools.product(*choices)


def candidate_count(n: int, m: int) -> int:
    """Number of ``(r, x0)`` candidates for ``M = m`` when ``m <= n / 2``.

    Equals ``n * sum_{norm<m} sum_{odd l} 2^l C(norm-1, l-1)`` and never
    exceeds ``n * 3^m / 2``.
    """
    total = 0
    for norm in range(1, m):
        for ell in range(1, norm + 1, 2):
            total += 2**ell * math.comb(norm - 1, ell - 1)
    return n * total


@dataclass(frozen=True)
class CyclingCount:
    count: int
    pairs: list[tuple[tuple[int, ...], int]] = field(repr=False)


def _chain_ends(perm: Permutation, r) -> np.ndarray:
    """``x_l`` for every start ``x0 = 0 .. N-1`` at once."""
    n = perm.n
    x = np.arange(n)
    y = perm.table.copy()
    for i, step in enumerate(r, start=1):
        if i % 2:
            y = (y + step) % n
            x = perm.inverse[y]
        else:
            x = (x + step) % n
            y = perm.table[x]
    return x


def count_m_cycling_pairs(
    perm: Permutation, m: int, *, max_m: int = 12, keep_pairs: bool = True
) -> CyclingCount:
    """Count pairs ``(r, x0)`` with nonzero ``r``, ``||r|| < m`` and pi-weight ``<= m``.

    The enumeration visits ``candidate_count(N, m) <= N 3^m / 2`` pairs, so
    ``m`` is capped by ``max_m``.
    """
    n = perm.n
    if m < 1:
        raise ValidationError("M must be at least 1")
    if m > max_m:
        raise ResourceLimitError(
            f"M={m} exceeds max_m={max_m}: enumeration needs up to N*3^M/2 = {n * 3**m // 2} chains"
        )
    starts = np.arange(n)
    count = 0
    pairs = []
    for r in nonzero_sequences(m, n):
        norm = sum(min_abs_residue(v, n) for v in r)
        ends = _chain_ends(perm, r)
        hits = np.nonzero(norm + circular_distance(starts, ends, n) <= m)[0]
        count += hits.size
        if keep_pairs:
            pairs.extend((r, int(x0)) for x0 in hits)
    return CyclingCount(count, pairs)


@dataclass(frozen=True)
class ZStatistics:
    m: int
    n1: int
    n2: int
    values: np.ndarray = field(repr=False)
    bound: float

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def divisibility_violations(self) -> int:
        return int(np.count_nonzero(self.values % self.n1))

    @property
    def within_bound(self) -> bool:
        return self.mean <= self.bound


def z_statistics(n1: int, n2: int, m: int, trials: int, seed=None) -> ZStatistics:
    """Monte Carlo distribution of the M-cycling count over random QC interleavers.

    Reports the mean against ``M 3^M / (1 - 1/n2)``, which bounds the
    expectation whenever ``M < n2``.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if not m < n2:
        raise ValidationError(f"the expectation bound needs M < n2 (M={m}, n2={n2})")
    ss = np.random.SeedSequence(seed)
    values = np.empty(trials, np.int64)
    for k, child in enumerate(ss.spawn(trials)):
        perm = build_qc_permutation(sample_qc(n1, n2, child))
        values[k] = count_m_cycling_pairs(perm, m, keep_pairs=False).count
    bound = m * 3**m / (1 - 1 / n2)
    return ZStatistics(m, n1, n2, values, bound)


def m_cycling_fraction(
    sampler: Callable[[np.random.Generator], Permutation], r, m: int, samples: int, seed=None
) -> float:
    """Fraction of draws ``(pi, x0)`` for which ``r`` M-cycles at ``x0``.

    ``pi`` comes from ``sampler(rng)`` and ``x0`` is uniform on ``{0..N-1}``.
    """
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(samples):
        perm = sampler(rng)
        x0 = int(rng.integers(perm.n))
        hits += m_cycles_at(perm, r, x0, m)
    return hits / samples


# -- trellis weight and distance -----------------------------------------------


def trellis_weight(code: RscCode, s) -> int:
    """Sum of ``d(a_j, b_j)`` over the error events of the circular path of ``s``.

    A path that never rests in state 0 forms one event covering the whole
    circle; it contributes ``floor(N / 2)``, the largest circular distance.
    """
    bits = np.asarray(s, dtype=np.uint8).reshape(-1)
    n = bits.size
    total = 0
    for ev in error_events(code, bits):
        total += n // 2 if ev.full_circle else circular_distance(ev.start, ev.end, n)
    return total


def codeword_weight(tc: TurboCode, s) -> int:
    """Weight of the transmitted codeword (after puncturing) of ``s``."""
    cw = turbo_encode(tc, s)
    m1, m2 = puncture_mask(tc.n, tc.puncture)
    return int(cw.systematic.sum() + cw.parity1[..., m1].sum() + cw.parity2[..., m2].sum())


@dataclass(frozen=True)
class DistanceReport:
    method: str
    bound_type: str
    value: int
    witness: np.ndarray = field(repr=False)
    search_params: dict = field(default_factory=dict)

    @property
    def support(self) -> list[int]:
        return np.flatnonzero(self.witness).tolist()

    def to_record(self) -> str:
        params = " ".join(f"{k}={v}" for k, v in self.search_params.items())
        return (
            f"method {self.method}\n"
            f"bound_type {self.bound_type}\n"
            f"value {self.value}\n"
            f"witness {' '.join(map(str, self.support))}\n"
            f"params {params}\n"
        )

    @classmethod
    def from_record(cls, text: str, n: int) -> "DistanceReport":
        fields = {}
        for line in text.strip().splitlines():
            key, _, rest = line.partition(" ")
            fields[key] = rest.strip()
        witness = np.zeros(n, np.uint8)
        witness[[int(v) for v in fields.get("witness", "").split()]] = 1
        params = {}
        for item in fields.get("params", "").split():
            k, _, v = item.partition("=")
            params[k] = int(v) if v.lstrip("-").isdigit() else v
        return cls(fields["method"], fields["bound_type"], int(fields["value"]), witness, params)


def min_distance_exhaustive(tc: TurboCode, *, max_n: int = 20, chunk: int = 1 << 16) -> DistanceReport:
    """Exact minimum distance by encoding all ``2^N - 1`` nonzero words."""
    n = tc.n
    if n > max_n:
        raise ResourceLimitError(f"exhaustive search needs 2^{n} encodings; limit is N <= {max_n}")
    m1, m2 = puncture_mask(n, tc.puncture)
    shifts = np.arange(n, dtype=np.int64)
    best, best_word = None, None
    for lo in range(1, 1 << n, chunk):
        words = np.arange(lo, min(lo + chunk, 1 << n), dtype=np.int64)
        bits = ((words[:, None] >> shifts) & 1).astype(np.uint8)
        cw = turbo_encode(tc, bits)
        w = cw.systematic.sum(1, dtype=np.int64) + cw.parity1[:, m1].sum(1, dtype=np.int64)
        w += cw.parity2[:, m2].sum(1, dtype=np.int64)
        k = int(np.argmin(w))
        if best is None or w[k] < best:
            best, best_word = int(w[k]), bits[k].copy()
    return DistanceReport("exhaustive", "exact", best, best_word, {"n": n})


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack rows of bits into little-endian uint64 words."""
    rows, n = bits.shape
    words = (n + 63) // 64
    padded = np.zeros((rows, words * 64), np.uint8)
    padded[:, :n] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed.view("<u8").astype(np.uint64))


def _shift_period(tc: TurboCode) -> int | None:
    """Cyclic shift under which codeword weights are invariant, if any."""
    qc = tc.perm.qc
    if qc is None or tc.termination != "tail_biting":
        return None
    if tc.puncture == "none":
        return qc.n2
    if qc.n2 % 2 == 0 and tc.n % 2 == 0:
        return qc.n2
    return None


def min_distance_low_weight(tc: TurboCode, max_input_weight: int) -> DistanceReport:
    """Minimum codeword weight over inputs of weight ``1 .. max_input_weight``.

    Uses linearity: the parity of a support is the XOR of the single-bit
    responses.  For quasi-cyclic interleavers the smallest support position
    is restricted to one period ``[0, n2)``, since shifting the input by
    ``n2`` shifts both parities without changing weight.  The result is an
    upper bound on the minimum distance (exact when the search covers all
    input weights).
    """
    if max_input_weight < 1:
        raise ValidationError("max_input_weight must be at least 1")
    n = tc.n
    depth = min(max_input_weight, n)
    eye = np.eye(n, dtype=np.uint8)
    cw = turbo_encode(tc, eye)
    m1, m2 = puncture_mask(n, tc.puncture)
    h1 = _pack_rows(cw.parity1)
    h2 = _pack_rows(cw.parity2)
    mask1 = _pack_rows(m1[None, :].astype(np.uint8))[0]
    mask2 = _pack_rows(m2[None, :].astype(np.uint8))[0]
    period = _shift_period(tc)
    first_limit = period if period is not None else n
    if tc.termination != "tail_biting":
        # open trellis: encoding from state 0 is still linear
        first_limit = n
    best, support = _kernels.low_weight_search(h1, h2, mask1, mask2, depth, first_limit, 1 << 40)
    witness = np.zeros(n, np.uint8)
    witness[support] = 1
    exact = depth == n
    params = {"max_input_weight": max_input_weight, "first_limit": first_limit}
    return DistanceReport("low_weight_search", "exact" if exact else "upper_bound", int(best), witness, params)


# -- chains from codewords --------------------------------------------------------


def _interval_index(events, n):
    owner = np.full(n, -1, np.int64)
    for k, ev in enumerate(events):
        owner[ev.positions(n)] = k
    return owner


def _shortest_cycle(num_a, num_b, edges):
    """Shortest elementary cycle of the bipartite multigraph, as an edge-id list.

    Vertices ``0 .. num_a-1`` are the ``A`` side and ``num_a ..`` the ``B`` side;
    ``edges[k] = (a, b)``.  The returned cycle starts at an ``A`` vertex.
    """
    nv = num_a + num_b
    adj = [[] for _ in range(nv)]
    for k, (a, b) in enumerate(edges):
        adj[a].append((num_a + b, k))
        adj[num_a + b].append((a, k))
    best = None
    for root in range(num_a):
        dist = {root: 0}
        parent = {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, k in adj[u]:
                if parent[u] is not None and k == parent[u][1]:
                    continue
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = (u, k)
                    queue.append(v)
                    continue
                length = dist[u] + dist[v] + 1
                if best is not None and length >= len(best):
                    continue
                pu = _tree_path(parent, u)
                pv = _tree_path(parent, v)
                nodes_u = {p for p, _ in pu}
                nodes_v = {p for p, _ in pv}
                if nodes_u & nodes_v:
                    continue
                # root -> ... -> u --k--> v -> ... -> root
                cycle = [e for _, e in reversed(pu)] + [k] + [e for _, e in pv]
                best = cycle
    return best


def _tree_path(parent, node):
    """``[(node, edge to parent), ...]`` from ``node`` up to (excluding) the root."""
    out = []
    while parent[node] is not None:
        up, k = parent[node]
        out.append((node, k))
        node = up
    return out


def chain_from_codeword(tc: TurboCode, s) -> Chain:
    """Chain of distinct elements whose pi-weight is at most the total event length.

    Builds the bipartite graph between the error events of ``s^pi`` (side A)
    and of ``s`` (side B), with one edge per support element ``x`` of
    ``s^pi`` joining its event to the event holding ``pi(x)``.  Every vertex
    has degree at least two, so an elementary cycle exists; the shortest one
    found by breadth-first search is read off as a chain.

    A weight-one interleaved input has no such cycle; it is paired with its
    right neighbour instead, which still gives pi-weight at most ``N``.
    """
    if tc.termination != "tail_biting":
        raise ValidationError("chains are defined on tail-biting trellises")
    n = tc.n
    perm = tc.perm
    bits = np.asarray(s, dtype=np.uint8).reshape(-1)
    if not bits.any():
        raise ValidationError("s must be nonzero")
    sp = perm.interleave(bits)
    u = np.flatnonzero(sp)
    if u.size == 1:
        x0 = int(u[0])
        x1 = (x0 + 1) % n
        return build_chain(perm, [int(perm.table[x1]) - int(perm.table[x0])], x0)
    ev_a = error_events(tc.code, sp)
    ev_b = error_events(tc.code, bits)
    own_a = _interval_index(ev_a, n)
    own_b = _interval_index(ev_b, n)
    labels = [int(x) for x in u]
    edges = [(int(own_a[x]), int(own_b[perm.table[x]])) for x in labels]
    cycle = _shortest_cycle(len(ev_a), len(ev_b), edges)
    if cycle is None:
        raise RuntimeError("no elementary cycle in the event graph; error events are inconsistent")
    xs = [labels[k] for k in cycle]
    ys = [int(perm.table[x]) for x in xs]
    r = []
    for i in range(1, len(xs)):
        step = ys[i] - ys[i - 1] if i % 2 else xs[i] - xs[i - 1]
        step %= n
        r.append(step if step <= n // 2 else step - n)
    chain = build_chain(perm, r, xs[0])
    assert list(chain.x) == xs
    return chain
