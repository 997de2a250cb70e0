"""Interleavers: quasi-cyclic (bi-dimensional), uniform random and S-random.

A quasi-cyclic interleaver of size ``N = n1 * n2`` is described by a column
permutation ``sigma`` of ``{0, ..., n2-1}`` and per-column cyclic shifts
``shifts[j]`` in ``{0, ..., n1-1}``.  Writing ``x = i * n2 + j`` the
interleaver is

    pi(i * n2 + j) = ((i + shifts[j]) mod n1) * n2 + sigma[j]

so that ``pi(x + n2) = pi(x) + n2 (mod N)`` for every ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from os import PathLike

import numpy as np

from .errors import ConstructionError, ValidationError

__all__ = [
    "QcSpec",
    "Permutation",
    "grid_to_index",
    "index_to_grid",
    "build_qc_permutation",
    "identity",
    "apply",
    "inverse_apply",
    "is_quasi_cyclic",
    "quasi_cyclic_periods",
    "sample_qc",
    "sample_uniform",
    "sample_s_random",
    "satisfies_s_constraint",
    "spread",
    "format_interleaver",
    "parse_interleaver",
    "read_interleaver",
    "write_interleaver",
    "load_table2",
    "load_table3",
    "storage_size",
]


@dataclass(frozen=True)
class QcSpec:
    """Compact description of an ``(n1, n2)``-quasi-cyclic interleaver.

    Parameters
    ----------
    n1 : int
        Column height (number of rows of the array).
    n2 : int
        Row width; also the quasi-cyclicity period.
    sigma : sequence of int
        Column permutation of ``{0, ..., n2-1}``.
    shifts : sequence of int
        Cyclic shift ``X_j`` applied to column ``j``, each in ``[0, n1)``.
    """

    n1: int
    n2: int
    sigma: tuple[int, ...]
    shifts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(v) for v in self.sigma))
        object.__setattr__(self, "shifts", tuple(int(v) for v in self.shifts))
        if int(self.n1) < 1 or int(self.n2) < 1:
            raise ValidationError(f"n1 and n2 must be positive, got n1={self.n1}, n2={self.n2}")
        if len(self.sigma) != self.n2:
            raise ValidationError(f"sigma has length {len(self.sigma)}, expected n2={self.n2}")
        if sorted(self.sigma) != list(range(self.n2)):
            raise ValidationError("sigma is not a bijection on {0, ..., n2-1}")
        if len(self.shifts) != self.n2:
            raise ValidationError(f"X has length {len(self.shifts)}, expected n2={self.n2}")
        bad = [x for x in self.shifts if not 0 <= x < self.n1]
        if bad:
            raise ValidationError(f"X values must lie in [0, {self.n1}), got {bad[:5]}")
        if self.n1 * self.n2 > np.iinfo(np.int64).max:
            raise ValidationError("N = n1 * n2 exceeds the addressable index range")

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    def negated(self) -> "QcSpec":
        """Same ``sigma`` with every shift replaced by ``-X_j mod n1``."""
        return QcSpec(self.n1, self.n2, self.sigma, tuple((-x) % self.n1 for x in self.shifts))


@dataclass(frozen=True, eq=False)
class Permutation:
    """Explicit permutation table with its inverse.

    ``table[x]`` is the image of ``x``.  When the permutation was built from a
    :class:`QcSpec`, that description is kept in ``qc`` for compact serialization.
    """

    table: np.ndarray
    qc: QcSpec | None = None
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64).reshape(-1)
        n = table.size
        if n < 1:
            raise ValidationError("a permutation needs at least one element")
        inverse = np.full(n, -1, dtype=np.int64)
        if table.min() < 0 or table.max() >= n:
            raise ValidationError(f"table values must lie in [0, {n})")
        inverse[table] = np.arange(n)
        if (inverse < 0).any():
            raise ValidationError("table is not a bijection")
        table.flags.writeable = False
        inverse.flags.writeable = False
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "inverse", inverse)
        if self.qc is not None and self.qc.size != n:
            raise ValidationError("attached QcSpec does not match the table size")

    @property
    def n(self) -> int:
        return int(self.table.size)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __call__(self, x):
        return apply(self, x)

    def interleave(self, seq):
        """Return ``seq`` read in interleaved order, ``out[t] = seq[pi(t)]``."""
        return np.asarray(seq)[..., self.table]

    def deinterleave(self, seq):
        """Inverse of :meth:`interleave`."""
        return np.asarray(seq)[..., self.inverse]


def _check_range(name, value, upper):
    if not 0 <= value < upper:
        raise ValidationError(f"{name}={value} outside [0, {upper})")


def grid_to_index(i: int, j: int, n2: int, n1: int | None = None) -> int:
    """Map array position ``(i, j)`` to ``i * n2 + j``."""
    if n1 is not None:
        _check_range("i", i, n1)
    elif i < 0:
        raise ValidationError(f"i={i} is negative")
    _check_range("j", j, n2)
    return i * n2 + j


def index_to_grid(x: int, n2: int, n1: int | None = None) -> tuple[int, int]:
    if x < 0 or (n1 is not None and x >= n1 * n2):
        raise ValidationError(f"index {x} outside the array")
    return divmod(x, n2)


def build_qc_permutation(spec: QcSpec) -> Permutation:
    """Materialize the quasi-cyclic interleaver described by ``spec``."""
    n1, n2 = spec.n1, spec.n2
    rows = np.arange(n1)[:, None]
    sigma = np.asarray(spec.sigma, dtype=np.int64)[None, :]
    shifts = np.asarray(spec.shifts, dtype=np.int64)[None, :]
    table = ((rows + shifts) % n1) * n2 + sigma
    return Permutation(table.reshape(-1), qc=spec)


def identity(n: int) -> Permutation:
    return Permutation(np.arange(n))


def apply(perm: Permutation, x: int) -> int:
    _check_range("x", x, perm.n)
    return int(perm.table[x])


def inverse_apply(perm: Permutation, y: int) -> int:
    _check_range("y", y, perm.n)
    return int(perm.inverse[y])


def is_quasi_cyclic(perm: Permutation, n2: int) -> bool:
    """True iff ``perm(x + n2) == perm(x) + n2 (mod N)`` for every ``x``."""
    n = perm.n
    if n2 < 1 or n % n2:
        raise ValidationError(f"period {n2} does not divide N={n}")
    x = np.arange(n)
    return bool(np.array_equal(perm.table[(x + n2) % n], (perm.table + n2) % n))


def quasi_cyclic_periods(perm: Permutation) -> list[int]:
    """All proper divisors ``p`` of ``N`` for which ``perm`` is ``p``-quasi-cyclic."""
    n = perm.n
    return [p for p in range(1, n) if n % p == 0 and is_quasi_cyclic(perm, p)]


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def sample_qc(n1: int, n2: int, seed=None) -> QcSpec:
    """Draw ``sigma`` uniformly and each shift independently and uniformly."""
    if n1 < 1 or n2 < 1:
        raise ValidationError(f"n1 and n2 must be positive, got n1={n1}, n2={n2}")
    rng = _rng(seed)
    sigma = rng.permutation(n2)
    shifts = rng.integers(0, n1, size=n2)
    return QcSpec(n1, n2, tuple(sigma.tolist()), tuple(shifts.tolist()))


def sample_uniform(n: int, seed=None) -> Permutation:
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    return Permutation(_rng(seed).permutation(n))


def satisfies_s_constraint(perm: Permutation, s: int) -> bool:
    """Check ``|pi(i) - pi(j)| > s`` for every pair with ``0 < |i - j| < s``."""
    t = perm.table
    for lag in range(1, min(s, perm.n)):
        if (np.abs(t[lag:] - t[:-lag]) <= s).any():
            return False
    return True


def sample_s_random(n: int, s: int, seed=None, max_attempts: int = 100) -> Permutation:
    """Randomized sequential S-random construction with restarts.

    Each position takes a random unused value whose distance to the values
    placed at the previous ``s - 1`` positions exceeds ``s``.  When no value
    fits, the construction restarts from scratch; after ``max_attempts``
    restarts a :class:`ConstructionError` is raised.  A spread close to
    ``floor(sqrt(n / 2))`` usually succeeds quickly.
    """
    if s < 1:
        raise ValidationError(f"S must be at least 1, got {s}")
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    rng = _rng(seed)
    for _ in range(max_attempts):
        pool = rng.permutation(n).tolist()
        placed: list[int] = []
        while pool:
            recent = placed[-(s - 1):] if s > 1 else []
            for k, cand in enumerate(pool):
                if all(abs(cand - v) > s for v in recent):
                    placed.append(pool.pop(k))
                    break
            else:
                break
        if len(placed) == n:
            return Permutation(np.array(placed))
    raise ConstructionError(
        f"no S-random permutation with n={n}, S={s} found in {max_attempts} attempts; "
        f"try S below {math.isqrt(n // 2)}, about sqrt(n/2)"
    )


def spread(perm: Permutation) -> int:
    """Minimum of ``|i - j| + |pi(i) - pi(j)|`` over all pairs ``i != j``."""
    n = perm.n
    if n < 2:
        raise ValidationError("spread needs n >= 2")
    t = perm.table
    best = n + n
    for lag in range(1, n):
        if lag >= best:
            break
        best = min(best, lag + int(np.abs(t[lag:] - t[:-lag]).min()))
    return best


# -- text format ---------------------------------------------------------------


def format_interleaver(perm: Permutation | QcSpec) -> str:
    """Serialize to the text format (``qc n1 n2`` or ``table N`` header)."""
    if isinstance(perm, Permutation) and perm.qc is not None:
        perm = perm.qc
    if isinstance(perm, QcSpec):
        lines = [
            f"qc {perm.n1} {perm.n2}",
            " ".join(map(str, perm.sigma)),
            " ".join(map(str, perm.shifts)),
        ]
    else:
        lines = [f"table {perm.n}", " ".join(map(str, perm.table.tolist()))]
    return "\n".join(lines) + "\n"


def parse_interleaver(text: str) -> Permutation:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty interleaver file")
    head = lines[0].split()
    try:
        if head[0] == "qc" and len(head) == 3:
            n1, n2 = int(head[1]), int(head[2])
            if len(lines) != 3:
                raise ValidationError("qc format needs exactly 3 lines")
            sigma = [int(v) for v in lines[1].split()]
            shifts = [int(v) for v in lines[2].split()]
            return build_qc_permutation(QcSpec(n1, n2, sigma, shifts))
        if head[0] == "table" and len(head) == 2:
            n = int(head[1])
            if len(lines) != 2:
                raise ValidationError("table format needs exactly 2 lines")
            table = [int(v) for v in lines[1].split()]
            if len(table) != n:
                raise ValidationError(f"table header says N={n} but {len(table)} values follow")
            return Permutation(np.array(table, dtype=np.int64))
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed interleaver file: {exc}") from exc
    raise ValidationError(f"unknown interleaver header {lines[0]!r}")


def read_interleaver(path: str | PathLike) -> Permutation:
    with open(path, encoding="utf-8") as fh:
        return parse_interleaver(fh.read())


def write_interleaver(perm: Permutation | QcSpec, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_interleaver(perm))


def _load_data(name: str) -> Permutation:
    text = resources.files("qcturbo.data").joinpath(name).read_text(encoding="utf-8")
    return parse_interleaver(text)


def load_table2() -> Permutation:
    """The published 20 x 20 interleaver used with RSC (13, 15)."""
    return _load_data("table2_n400.txt")


def load_table3() -> Permutation:
    """The published 40 x 40 interleaver used with RSC (37, 21)."""
    return _load_data("table3_n1600.txt")


def storage_size(perm: Permutation) -> int:
    """Number of integers needed to store ``perm`` in its compact form."""
    if perm.qc is not None:
        return 2 * perm.qc.n2
    return perm.n
