"""Finite-precision arithmetic in Z/p^N.

Every p-adic integer in the package is a residue modulo p^N for an odd prime
p.  Python ints back all values, so intermediate products never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonUnitError, ParameterError, PrecisionError

INFINITY = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def require_odd_prime(p: int) -> int:
    """Return ``p`` unchanged, or raise :class:`ParameterError`.

    p = 2 is rejected on purpose: 1 + 2u does not generate 1 + 2(Z/2^n).
    """
    if not isinstance(p, int) or isinstance(p, bool):
        raise ParameterError(f"prime must be an int, got {p!r}")
    if p == 2:
        raise ParameterError("p = 2 is not supported (odd primes only)")
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    return p


def valuation(x: int, p: int) -> int | float:
    """Largest v with p^v | x; ``math.inf`` for x = 0."""
    if x == 0:
        return INFINITY
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def factorial_valuation(i: int, p: int) -> int:
    """v_p(i!) by Legendre's formula."""
    v, pk = 0, p
    while pk <= i:
        v += i // pk
        pk *= p
    return v


def centered(residue: int, modulus: int) -> int:
    """Representative of ``residue`` in (-modulus/2, modulus/2]."""
    r = residue % modulus
    return r - modulus if 2 * r > modulus else r


@dataclass(frozen=True)
class ModularInt:
    """An element of Z/p^N.

    >>> ModularInt(3, 2, 4) + ModularInt(3, 2, 7)
    ModularInt(p=3, N=2, residue=2)
    """

    p: int
    N: int
    residue: int

    def __post_init__(self):
        require_odd_prime(self.p)
        if self.N < 1:
            raise ParameterError(f"precision N must be >= 1, got {self.N}")
        object.__setattr__(self, "residue", self.residue % self.p**self.N)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _check(self, other: ModularInt) -> None:
        if (self.p, self.N) != (other.p, other.N):
            raise ParameterError(
                f"mismatched rings Z/{self.p}^{self.N} and Z/{other.p}^{other.N}"
            )

    def _coerce(self, other) -> ModularInt:
        if isinstance(other, ModularInt):
            self._check(other)
            return other
        if isinstance(other, int):
            return ModularInt(self.p, self.N, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ModularInt(self.p, self.N, self.residue + other.residue)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ModularInt(self.p, self.N, self.residue - other.residue)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ModularInt(self.p, self.N, self.residue * other.residue)

    __rmul__ = __mul__

    def __neg__(self):
        return ModularInt(self.p, self.N, -self.residue)

    def inverse(self) -> ModularInt:
        if self.residue % self.p == 0:
            raise NonUnitError(f"{self.residue} is not a unit mod {self.p}^{self.N}")
        return ModularInt(self.p, self.N, pow(self.residue, -1, self.modulus))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return ModularInt(self.p, self.N, pow(self.residue, k, self.modulus))

    def valuation(self) -> int:
        """p-adic valuation of the residue, capped at N."""
        v = valuation(self.residue, self.p)
        return self.N if v == INFINITY else int(v)

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def __int__(self):
        return self.residue


def mod_add(a: ModularInt, b: ModularInt) -> ModularInt:
    return a + b


def mod_mul(a: ModularInt, b: ModularInt) -> ModularInt:
    return a * b


def mod_neg(a: ModularInt) -> ModularInt:
    return -a


def mod_inv(a: ModularInt) -> ModularInt:
    return a.inverse()


def mult_order(q: int, p: int, n: int) -> int:
    """Least k >= 1 with q^k = 1 mod p^n.

    Uses that the order divides (p-1)p^(n-1), so only divisors are tried.
    """
    require_odd_prime(p)
    if n < 1:
        raise ParameterError(f"level n must be >= 1, got {n}")
    if q % p == 0:
        raise ParameterError(f"{q} is divisible by {p}; no multiplicative order")
    mod = p**n
    group = (p - 1) * p ** (n - 1)
    divisors = sorted(
        d for k in range(1, math.isqrt(group) + 1) if group % k == 0 for d in {k, group // k}
    )
    for d in divisors:
        if pow(q, d, mod) == 1 % mod:
            return d
    raise AssertionError("unreachable: order must divide the group order")


def padic_binomial(c: int, i: int, p: int, N: int, c_precision: int | None = None) -> ModularInt:
    """binom(c, i) reduced mod p^N, for a p-adic integer c.

    ``c`` is an integer representative (negative values allowed).  When
    ``c_precision`` is given, c is only known modulo p^c_precision; the result
    is determined only if c_precision >= N + v_p(i!), otherwise
    :class:`PrecisionError` is raised.  With ``c_precision=None`` c is exact.
    """
    require_odd_prime(p)
    if i < 0:
        raise ParameterError(f"binomial index must be >= 0, got {i}")
    need = N + factorial_valuation(i, p)
    if c_precision is not None and c_precision < need:
        raise PrecisionError(
            f"binom(c, {i}) mod {p}^{N} needs c mod {p}^{need}, got {p}^{c_precision}"
        )
    # Numerator taken mod p^need keeps the exact quotient mod p^N.
    guard = p**need
    num = 1
    for k in range(i):
        num = num * (c - k) % guard
    den = math.factorial(i)
    v = factorial_valuation(i, p)
    num //= p**v
    den //= p**v
    mod = p**N
    return ModularInt(p, N, num * pow(den, -1, mod))
