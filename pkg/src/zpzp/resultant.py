"""Exact resultants of integer polynomials by the subresultant PRS.

Polynomials are lists of Python ints, lowest degree first.  The zero
polynomial is ``[]``.
"""

from __future__ import annotations

from functools import reduce
from math import gcd


def trim(f: list[int]) -> list[int]:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: list[int]) -> int:
    return len(f) - 1


def content(f: list[int]) -> int:
    return reduce(gcd, f, 0)


def pseudo_remainder(A: list[int], B: list[int]) -> list[int]:
    """prem(A, B) = lc(B)^(deg A - deg B + 1) * A mod B, computed over Z."""
    R = trim(A)
    db, lb = degree(B), B[-1]
    e = degree(A) - db + 1
    while R and degree(R) >= db:
        shift, lr = degree(R) - db, R[-1]
        R = [lb * x for x in R]
        for k, b in enumerate(B):
            R[shift + k] -= lr * b
        R = trim(R)
        e -= 1
    return [x * lb**e for x in R]


def resultant(A: list[int], B: list[int]) -> int:
    """Res(A, B) = lc(A)^deg(B) * prod_(A(a)=0) B(a).

    Subresultant pseudo-remainder sequence; every division is exact.
    """
    A, B = trim(A), trim(B)
    if not A or not B:
        return 0
    a, b = content(A), content(B)
    A = [x // a for x in A]
    B = [x // b for x in B]
    t = a ** degree(B) * b ** degree(A)
    s, g, h = 1, 1, 1
    if degree(A) < degree(B):
        A, B = B, A
        if degree(A) % 2 and degree(B) % 2:
            s = -1
    while degree(B) > 0:
        delta = degree(A) - degree(B)
        if degree(A) % 2 and degree(B) % 2:
            s = -s
        R = pseudo_remainder(A, B)
        A = B
        div = g * h**delta
        B = [x // div for x in R]
        g = A[-1]
        h = g**delta // h ** (delta - 1) if delta >= 1 else h
        if not B:
            return 0
    h = B[-1] ** degree(A) // h ** (degree(A) - 1) if degree(A) >= 1 else h
    return s * t * h


def circulant_det(first_row: list[int]) -> int:
    """Determinant of the P x P circulant matrix with the given first row.

    Equals prod_k f(zeta^k) over P-th roots of unity, f = sum first_row[l] x^l,
    which is Res(x^P - 1, f).
    """
    P = len(first_row)
    if P == 0:
        raise ValueError("circulant needs at least one entry")
    f = trim([int(x) for x in first_row])
    if not f:
        return 0
    if degree(f) == 0:
        return f[0] ** P
    return resultant([-1] + [0] * (P - 1) + [1], f)
