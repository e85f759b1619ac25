"""The 0/1 orbit matrices A(p, n, d, u) and three routes to their determinant.

``a_ij = 1`` iff ``j = (i-1)(1+pu)^k + 1 mod p^n`` for some ``0 <= k < d``,
with 1-based i, j in 1..p^n.  Routes:

* :func:`det_exact` -- fraction-free Bareiss elimination over Python ints;
* :func:`det_blocks` -- product of circulant determinants over the
  q-orbits of Z/p^n, each an integer resultant;
* :func:`closed_form` -- 1, d^((p-1)(n-1)) or 0.

:func:`det_modular` is a fourth, CRT-based route used for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DisagreementError, ParameterError
from .padic import is_prime, mult_order, require_odd_prime
from .resultant import circulant_det


@dataclass(frozen=True)
class OrbitMatrixParams:
    p: int
    n: int
    d: int
    u: int

    def __post_init__(self):
        require_odd_prime(self.p)
        if self.n < 1 or self.d < 1:
            raise ParameterError(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        if self.u % self.p == 0:
            raise ParameterError(f"u = {self.u} must be coprime to p = {self.p}")

    @property
    def q(self) -> int:
        return 1 + self.p * self.u

    @property
    def size(self) -> int:
        return self.p**self.n

    def astuple(self) -> tuple[int, int, int, int]:
        return (self.p, self.n, self.d, self.u)


@dataclass(frozen=True, eq=False)
class OrbitMatrix:
    params: OrbitMatrixParams
    entries: np.ndarray  # 0-based storage of the 1-based matrix

    def entry(self, i: int, j: int) -> int:
        return int(self.entries[i - 1, j - 1])

    def row_support(self, i: int) -> list[int]:
        return [int(j) + 1 for j in np.flatnonzero(self.entries[i - 1])]

    def to_grid(self) -> str:
        return "\n".join(" ".join(str(int(x)) for x in row) for row in self.entries) + "\n"

    def to_coordinates_csv(self) -> str:
        rows = ["i,j"]
        for i, j in zip(*np.nonzero(self.entries)):
            rows.append(f"{i + 1},{j + 1}")
        return "\n".join(rows) + "\n"


def build_matrix(params: OrbitMatrixParams) -> OrbitMatrix:
    P, q = params.size, params.q
    A = np.zeros((P, P), dtype=np.int64)
    x = np.arange(P, dtype=np.int64)
    for k in range(params.d):
        # Repeated k-values give repeated positions; the matrix is an indicator.
        A[x, (x * pow(q, k, P)) % P] = 1
    A.setflags(write=False)
    return OrbitMatrix(params, A)


def bareiss_det(rows) -> int:
    """Exact determinant by fraction-free elimination with row pivoting."""
    a = [[int(x) for x in row] for row in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        piv, pivot_row = a[k][k], a[k][k + 1 :]
        for i in range(k + 1, n):
            row = a[i]
            f = row[k]
            if f == 0:
                if piv != prev:
                    row[k + 1 :] = [x * piv // prev for x in row[k + 1 :]]
            else:
                row[k + 1 :] = [(x * piv - f * y) // prev for x, y in zip(row[k + 1 :], pivot_row)]
        prev = piv
    return sign * a[-1][-1]


def det_exact(M: OrbitMatrix) -> int:
    return bareiss_det(M.entries.tolist())


def _word_primes(count: int) -> list[int]:
    primes, c = [], 2**31 - 1
    while len(primes) < count:
        if is_prime(c):
            primes.append(c)
        c -= 2
    return primes


def det_modular(M) -> int:
    """Exact determinant from residues modulo word-size primes (CRT).

    The Hadamard bound prod ||row||_2 fixes how many primes are needed.
    """
    A = np.asarray(getattr(M, "entries", M), dtype=np.int64)
    norms_sq = [int(x) for x in (A * A).sum(axis=1)]
    if 0 in norms_sq:
        return 0
    bound_sq = math.prod(norms_sq)
    bound = math.isqrt(bound_sq) + 1
    residue, modulus = 0, 1
    for prime in _word_primes(1 + bound.bit_length() // 30):
        r = _kernels.det_mod_prime(A, prime)
        # CRT update of (residue mod modulus) with (r mod prime)
        t = (r - residue) * pow(modulus, -1, prime) % prime
        residue += modulus * t
        modulus *= prime
        if modulus > 2 * bound:
            break
    return residue - modulus if residue > modulus // 2 else residue


@dataclass(frozen=True)
class OrbitClass:
    """One q-orbit of Z/p^n, written as matrix indices t = x + 1.

    ``members`` follow the cyclic order t -> (t - 1) q + 1.  The fixed point
    {1} has ``m = 0`` and ``i = 0``; otherwise the class is
    {i p^(m-1) + 1 + p^m l}.
    """

    members: tuple[int, ...]
    m: int
    i: int

    @property
    def size(self) -> int:
        return len(self.members)


def orbit_partition(p: int, n: int, u: int) -> list[OrbitClass]:
    """Classes {1} and {i p^(m-1) + 1 + p^m l} for 1 <= i < p, 1 <= m <= n."""
    require_odd_prime(p)
    if u % p == 0:
        raise ParameterError(f"u = {u} must be coprime to p = {p}")
    P, q = p**n, 1 + p * u
    classes = [OrbitClass((1,), 0, 0)]
    for m in range(1, n + 1):
        for i in range(1, p):
            x = i * p ** (m - 1)
            members = [x]
            y = x * q % P
            while y != x:
                members.append(y)
                y = y * q % P
            classes.append(OrbitClass(tuple(t + 1 for t in members), m, i))
    return classes


def block_first_row(cls: OrbitClass, d: int) -> list[int]:
    """First row of the circulant block of A on one orbit: offsets k mod P, k < d."""
    P = cls.size
    row = [0] * P
    for k in range(min(d, P)):
        row[k % P] = 1
    return row


def circulant_det_exact(first_row: list[int], P: int | None = None) -> int:
    if P is not None and P != len(first_row):
        raise ParameterError(f"first row has length {len(first_row)}, expected {P}")
    return circulant_det(first_row)


def det_blocks(params: OrbitMatrixParams) -> int:
    out = 1
    for cls in orbit_partition(params.p, params.n, params.u):
        out *= circulant_det_exact(block_first_row(cls, params.d))
        if out == 0:
            break
    return out


def closed_form(p: int, n: int, d: int) -> int:
    require_odd_prime(p)
    if n == 1:
        return 1
    if d < p:
        return d ** ((p - 1) * (n - 1))
    return 0


@dataclass(frozen=True)
class VerifyRecord:
    p: int
    n: int
    d: int
    u: int
    det_exact: int | None
    det_blocks: int | None
    closed_form: int | None

    @property
    def agree(self) -> bool:
        vals = [v for v in (self.det_exact, self.det_blocks, self.closed_form) if v is not None]
        return len(set(vals)) <= 1

    def csv_row(self) -> str:
        cells = [self.p, self.n, self.d, self.u, self.det_exact, self.det_blocks, self.closed_form]
        return ",".join("" if c is None else str(c) for c in cells) + f",{str(self.agree).lower()}"


VERIFY_HEADER = "p,n,d,u,det_exact,det_blocks,closed_form,agree"


def verify(params: OrbitMatrixParams, methods=("exact", "blocks", "closed"), strict: bool = True) -> VerifyRecord:
    """Compute the requested determinants; raise on disagreement when ``strict``."""
    M = build_matrix(params) if "exact" in methods else None
    rec = VerifyRecord(
        *params.astuple(),
        det_exact=det_exact(M) if M is not None else None,
        det_blocks=det_blocks(params) if "blocks" in methods else None,
        closed_form=closed_form(params.p, params.n, params.d) if "closed" in methods else None,
    )
    if strict and not rec.agree:
        M = M if M is not None else build_matrix(params)
        raise DisagreementError(f"determinant routes disagree for {params}: {rec}\n{M.to_grid()}")
    return rec


def class_size_census(p: int, n: int) -> int:
    """sum_m (p-1) p^(n-m) + 1, which equals p^n."""
    return sum((p - 1) * p ** (n - m) for m in range(1, n + 1)) + 1


def expected_class_size(p: int, n: int, m: int, u: int) -> int:
    """Size of the class at depth m: the order of q modulo p^(n-m+1), i.e. p^(n-m)."""
    return mult_order(1 + p * u, p, n - m + 1)
