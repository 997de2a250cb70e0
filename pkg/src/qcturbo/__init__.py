"""Quasi-cyclic interleavers and tail-biting turbo codes.

Submodules: ``permutation`` (interleavers), ``rsc`` (constituent codes),
``turbo`` (encoder, puncturing, iterative decoder), ``analysis`` (chains,
M-cycling, distance search) and ``simulation`` (AWGN Monte Carlo).
"""

from .permutation import (
    Permutation,
    QcSpec,
    build_qc_permutation,
    load_table2,
    load_table3,
    sample_qc,
    sample_uniform,
)
from .rsc import RscCode, lambda_parameter
from .turbo import TurboCode, turbo_decode, turbo_encode

__version__ = "0.1.0"
