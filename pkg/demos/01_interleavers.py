"""Quasi-cyclic interleavers: construction, the shift property, spread and storage."""

import numpy as np

from qcturbo import permutation as P

# A 5 x 5 interleaver: a column permutation sigma plus one cyclic shift per column.
spec = P.QcSpec(n1=5, n2=5, sigma=(3, 2, 0, 4, 1), shifts=(0, 2, 1, 3, 4))
pi = P.build_qc_permutation(spec)
print("pi =", pi.table.tolist())

# Column j is rotated down by shifts[j] and moved to column sigma[j]; each output
# cell below shows the input index that lands there.
grid = np.arange(25).reshape(5, 5)
print(grid.ravel()[pi.inverse].reshape(5, 5))

# The shift vector printed next to the published listing is the negation of the
# one that reproduces it.
printed = P.QcSpec(5, 5, spec.sigma, (0, 3, 4, 2, 1))
print("printed shifts give", P.build_qc_permutation(printed).table[:3].tolist(), "instead of", pi.table[:3].tolist())
print("negated:", printed.negated().shifts)

# Quasi-cyclic: moving the input by one row moves the output by one row.
print("pi(x + 5) == pi(x) + 5 for all x:", P.is_quasi_cyclic(pi, 5))
print("periods:", P.quasi_cyclic_periods(pi))

# Random members of the family keep the property; uniform permutations almost never have it.
qc = P.build_qc_permutation(P.sample_qc(20, 20, seed=1))
uni = P.sample_uniform(400, seed=1)
print("QC 20x20:", P.is_quasi_cyclic(qc, 20), " uniform 400:", P.is_quasi_cyclic(uni, 20))

# Spread min |i-j| + |pi(i) - pi(j)|: QC designs trade spread for structure.
srand = P.sample_s_random(400, 10, seed=1)
for name, perm in [("published 20x20", P.load_table2()), ("random QC", qc), ("uniform", uni), ("S-random S=10", srand)]:
    print(f"{name:16s} spread {P.spread(perm):3d}  stored as {P.storage_size(perm)} integers")

# Text format used by the command line tools.
print(P.format_interleaver(pi))
