"""Chains, pi-weight and the M-cycling count Z.

A low-weight turbo codeword forces a short chain x0, x1, ... whose elements
alternate between positions close in natural order and close in interleaved
order.  Counting such chains (Z) measures how exposed an interleaver is.
"""

import numpy as np

from qcturbo import analysis as A
from qcturbo import permutation as P
from qcturbo.rsc import RscCode
from qcturbo.turbo import TurboCode, turbo_encode

pi = P.build_qc_permutation(P.QcSpec(5, 5, (3, 2, 0, 4, 1), (0, 2, 1, 3, 4)))

chain = A.build_chain(pi, r=(1, 1, 1), x0=0)
print("x =", chain.x, " y = pi(x) =", chain.y, " pi-weight =", chain.pi_weight)
print("7-cycles:", A.m_cycles_at(pi, (1, 1, 1), 0, 7), " 6-cycles:", A.m_cycles_at(pi, (1, 1, 1), 0, 6))

# Z for the small example is a multiple of n1 = 5, because every cycling pair
# repeats one row further down.
for m in range(1, 8):
    z = A.count_m_cycling_pairs(pi, m, keep_pairs=False).count
    print(f"M={m}: Z={z:5d}  candidates={A.candidate_count(25, m):6d}")

# Over random 10 x 10 QC interleavers Z stays far below its expectation ceiling.
stats = A.z_statistics(10, 10, 4, trials=200, seed=0)
print(f"mean Z = {stats.mean:.1f}, ceiling {stats.bound:.0f}, divisibility violations {stats.divisibility_violations}")
print("distribution:", np.bincount(stats.values // 10))

# From a codeword back to a chain: the chain's pi-weight is at most 2 w / lambda.
tc = TurboCode(RscCode(0o7, 0o5), pi, "none")
rng = np.random.default_rng(3)
for _ in range(5):
    s = (rng.random(25) < 0.15).astype(np.uint8)
    if not s.any():
        continue
    w = turbo_encode(tc, s).weight
    c = A.chain_from_codeword(tc, s)
    print(f"weight {w:2d}: chain {c.x}, pi-weight {c.pi_weight} <= {4 * w}")
