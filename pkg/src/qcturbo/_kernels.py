"""Compiled inner loops (trellis runs, log-MAP BCJR, low-weight search)."""

import numpy as np
from numba import njit

CLAMP = 50.0
NEG = -1.0e300


@njit(cache=True, fastmath=True)
def run_trellis(next_state, parity_out, bits, start):
    nb, n = bits.shape
    par = np.empty((nb, n), np.uint8)
    final = np.empty(nb, np.int64)
    for b in range(nb):
        s = start[b]
        for t in range(n):
            u = bits[b, t]
            par[b, t] = parity_out[s, u]
            s = next_state[s, u]
        final[b] = s
    return par, final


@njit(cache=True, fastmath=True)
def trellis_states(next_state, bits, start):
    n = bits.shape[0]
    states = np.empty(n + 1, np.int64)
    s = start
    states[0] = s
    for t in range(n):
        s = next_state[s, bits[t]]
        states[t + 1] = s
    return states


@njit(cache=True, fastmath=True, inline="always")
def _jac(a, b, maxlog):
    # log(exp(a) + exp(b))
    if a < b:
        a, b = b, a
    if b <= NEG:
        return a
    if maxlog or a - b > 40.0:
        return a
    return a + np.log1p(np.exp(b - a))


@njit(cache=True, fastmath=True)
def _gammas(lsys, lpar, prior, g):
    # g[t, u, p]: branch metric of input bit u with parity bit p
    for t in range(lsys.shape[0]):
        a = 0.5 * (lsys[t] + prior[t])
        p = 0.5 * lpar[t]
        g[t, 0, 0] = a + p
        g[t, 0, 1] = a - p
        g[t, 1, 0] = -a + p
        g[t, 1, 1] = -a - p


@njit(cache=True, fastmath=True)
def _forward(next_state, parity_out, g, alpha0, maxlog, out):
    n = g.shape[0]
    ns = next_state.shape[0]
    out[0, :] = alpha0
    for t in range(n):
        for v in range(ns):
            out[t + 1, v] = NEG
        for s in range(ns):
            a = out[t, s]
            if a <= NEG:
                continue
            for u in range(2):
                v = next_state[s, u]
                out[t + 1, v] = _jac(out[t + 1, v], a + g[t, u, parity_out[s, u]], maxlog)
        m = NEG
        for v in range(ns):
            if out[t + 1, v] > m:
                m = out[t + 1, v]
        for v in range(ns):
            if out[t + 1, v] > NEG:
                out[t + 1, v] -= m


@njit(cache=True, fastmath=True)
def _backward(next_state, parity_out, g, betan, maxlog, out):
    n = g.shape[0]
    ns = next_state.shape[0]
    out[n, :] = betan
    for t in range(n - 1, -1, -1):
        m = NEG
        for s in range(ns):
            acc = NEG
            for u in range(2):
                v = next_state[s, u]
                b = out[t + 1, v]
                if b > NEG:
                    acc = _jac(acc, g[t, u, parity_out[s, u]] + b, maxlog)
            out[t, s] = acc
            if acc > m:
                m = acc
        for s in range(ns):
            if out[t, s] > NEG:
                out[t, s] -= m


@njit(cache=True, fastmath=True)
def _app(next_state, parity_out, g, alpha, beta, maxlog, app):
    n = g.shape[0]
    ns = next_state.shape[0]
    for t in range(n):
        l0 = NEG
        l1 = NEG
        for s in range(ns):
            a = alpha[t, s]
            if a <= NEG:
                continue
            for u in range(2):
                v = next_state[s, u]
                b = beta[t + 1, v]
                if b <= NEG:
                    continue
                m = a + g[t, u, parity_out[s, u]] + b
                if u == 0:
                    l0 = _jac(l0, m, maxlog)
                else:
                    l1 = _jac(l1, m, maxlog)
        app[t] = l0 - l1


@njit(cache=True, fastmath=True)
def bcjr(next_state, parity_out, lsys, lpar, prior, wraps, open_start, maxlog):
    """A-posteriori LLRs of the information bits (LLR > 0 means bit 0).

    Circular trellis: forward and backward metrics start uniform and are
    carried around the circle ``wraps`` times.  With ``open_start`` the
    trellis starts in state 0 and ends free instead.
    """
    n = lsys.shape[0]
    ns = next_state.shape[0]
    g = np.empty((n, 2, 2))
    _gammas(lsys, lpar, prior, g)
    alpha = np.empty((n + 1, ns))
    beta = np.empty((n + 1, ns))
    start = np.zeros(ns)
    if open_start:
        for s in range(1, ns):
            start[s] = NEG
        _forward(next_state, parity_out, g, start, maxlog, alpha)
        _backward(next_state, parity_out, g, np.zeros(ns), maxlog, beta)
    else:
        _forward(next_state, parity_out, g, start, maxlog, alpha)
        for _ in range(wraps - 1):
            _forward(next_state, parity_out, g, alpha[n].copy(), maxlog, alpha)
        _backward(next_state, parity_out, g, start, maxlog, beta)
        for _ in range(wraps - 1):
            _backward(next_state, parity_out, g, beta[0].copy(), maxlog, beta)
    app = np.empty(n)
    _app(next_state, parity_out, g, alpha, beta, maxlog, app)
    return app


@njit(cache=True, fastmath=True)
def bcjr_exact_circular(next_state, parity_out, lsys, lpar, prior, maxlog):
    """Exact tail-biting APP: one forward/backward pair per common start/end state."""
    n = lsys.shape[0]
    ns = next_state.shape[0]
    g = np.empty((n, 2, 2))
    _gammas(lsys, lpar, prior, g)
    alpha = np.empty((n + 1, ns))
    beta = np.empty((n + 1, ns))
    l0 = np.full(n, NEG)
    l1 = np.full(n, NEG)
    # unnormalized log scale must be comparable across start states
    for s0 in range(ns):
        delta = np.full(ns, NEG)
        delta[s0] = 0.0
        alpha[0, :] = delta
        for t in range(n):
            for v in range(ns):
                alpha[t + 1, v] = NEG
            for s in range(ns):
                if alpha[t, s] <= NEG:
                    continue
                for u in range(2):
                    v = next_state[s, u]
                    alpha[t + 1, v] = _jac(alpha[t + 1, v], alpha[t, s] + g[t, u, parity_out[s, u]], maxlog)
        beta[n, :] = delta
        for t in range(n - 1, -1, -1):
            for s in range(ns):
                acc = NEG
                for u in range(2):
                    v = next_state[s, u]
                    if beta[t + 1, v] > NEG:
                        acc = _jac(acc, g[t, u, parity_out[s, u]] + beta[t + 1, v], maxlog)
                beta[t, s] = acc
        for t in range(n):
            for s in range(ns):
                if alpha[t, s] <= NEG:
                    continue
                for u in range(2):
                    v = next_state[s, u]
                    if beta[t + 1, v] <= NEG:
                        continue
                    m = alpha[t, s] + g[t, u, parity_out[s, u]] + beta[t + 1, v]
                    if u == 0:
                        l0[t] = _jac(l0[t], m, maxlog)
                    else:
                        l1[t] = _jac(l1[t], m, maxlog)
    return l0 - l1


@njit(cache=True, fastmath=True)
def _clamp(x):
    for i in range(x.shape[0]):
        if x[i] > CLAMP:
            x[i] = CLAMP
        elif x[i] < -CLAMP:
            x[i] = -CLAMP


@njit(cache=True, fastmath=True)
def turbo_decode(next_state, parity_out, perm, inv, lsys, lp1, lp2, prior,
                 iterations, wraps, open_start, maxlog):
    n = lsys.shape[0]
    lsys2 = np.empty(n)
    for t in range(n):
        lsys2[t] = lsys[perm[t]]
    le21 = prior.copy()
    le12 = np.zeros(n)
    app = np.zeros(n)
    prior2 = np.empty(n)
    flips = np.zeros(iterations, np.int64)
    mean_abs = np.zeros(iterations)
    prev = np.zeros(n, np.uint8)
    for it in range(iterations):
        a1 = bcjr(next_state, parity_out, lsys, lp1, le21, wraps, open_start, maxlog)
        for t in range(n):
            le12[t] = a1[t] - lsys[t] - le21[t]
        _clamp(le12)
        for t in range(n):
            prior2[t] = le12[perm[t]]
        a2 = bcjr(next_state, parity_out, lsys2, lp2, prior2, wraps, open_start, maxlog)
        for t in range(n):
            le21[perm[t]] = a2[t] - lsys2[t] - prior2[t]
        _clamp(le21)
        acc = 0.0
        changed = 0
        for t in range(n):
            app[t] = lsys[t] + le12[t] + le21[t]
            acc += abs(app[t])
            d = 1 if app[t] < 0 else 0
            if d != prev[t]:
                changed += 1
            prev[t] = d
        flips[it] = changed
        mean_abs[it] = acc / n
    return prev, app, flips, mean_abs


@njit(cache=True, fastmath=True)
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, fastmath=True)
def low_weight_search(h1, h2, mask1, mask2, max_weight, first_limit, best_init):
    """Depth-first search over supports of size ``1..max_weight``.

    ``h1[i]`` and ``h2[i]`` are the bit-packed parity responses of the two
    branches to a single one at position ``i``; encoding is linear, so the
    parity of a support is the XOR of its responses.  The first (smallest)
    support position ranges over ``[0, first_limit)``.
    """
    n, nw = h1.shape
    acc1 = np.zeros((max_weight + 1, nw), np.uint64)
    acc2 = np.zeros((max_weight + 1, nw), np.uint64)
    stack = np.zeros(max_weight, np.int64)
    best = best_init
    best_support = np.full(max_weight, -1, np.int64)
    best_len = 0
    depth = 0
    stack[0] = 0
    while depth >= 0:
        i = stack[depth]
        limit = first_limit if depth == 0 else n
        if i >= limit:
            depth -= 1
            if depth >= 0:
                stack[depth] += 1
            continue
        w = depth + 1
        for k in range(nw):
            acc1[depth + 1, k] = acc1[depth, k] ^ h1[i, k]
            acc2[depth + 1, k] = acc2[depth, k] ^ h2[i, k]
            w += popcount64(acc1[depth + 1, k] & mask1[k])
            w += popcount64(acc2[depth + 1, k] & mask2[k])
        if w < best:
            best = w
            best_len = depth + 1
            for k in range(depth + 1):
                best_support[k] = stack[k]
        if depth + 1 < max_weight and i + 1 < n:
            depth += 1
            stack[depth] = i + 1
        else:
            stack[depth] += 1
    return best, best_support[:best_len]
