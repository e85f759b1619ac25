"""Hot inner loops, compiled with numba when available.

Each kernel has a numba version (``*_numba``) and a vectorised numpy version
(``*_numpy``).  The public name dispatches to numba unless the environment
variable ``ZPZP_DISABLE_NUMBA`` is set to a truthy value or numba is missing.

Fixed-width kernels only see int64 arrays whose modulus is below
``INT64_MODULUS_LIMIT``; larger moduli are carried as object arrays of Python
ints and always take the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _flag_disabled() -> bool:
    return os.environ.get("ZPZP_DISABLE_NUMBA", "0").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not _flag_disabled()
BACKEND = "numba" if USE_NUMBA else "numpy"

# Products of two residues stay below 2**50 and sums of up to 2**12 of them
# below 2**62, so int64 accumulation is exact below this modulus.
INT64_MODULUS_LIMIT = 2**25


def coefficient_dtype(modulus: int, summands: int = 1):
    """int64 when ``summands`` products of residues can be added without overflow."""
    if modulus < INT64_MODULUS_LIMIT and summands * (modulus - 1) ** 2 < 2**62:
        return np.int64
    return object


# ---------------------------------------------------------------------------
# modular inverse (numba helper)


@njit(cache=True)
def _modinv(a, m):
    t, new_t = 0, 1
    r, new_r = m, a % m
    while new_r != 0:
        quo = r // new_r
        t, new_t = new_t, t - quo * new_t
        r, new_r = new_r, r - quo * new_r
    if r != 1:
        return -1
    return t % m


# ---------------------------------------------------------------------------
# skew product
#
# A, B: (DT, DS) coefficient arrays of T-left polynomials sum c[j, i] T^j S^i.
# O[l, s]: (DS, DS) matrix of F -> binom(l, s) tau^s (tau - 1)^(l - s) F, the
# coefficient of T^s in F(S) T^l.  Columns are S-order preserving, so each
# O[l, s] is lower triangular.


@njit(cache=True)
def skew_product_numba(A, B, O, mod):
    DT, DS = A.shape
    C = np.zeros((DT, DS), np.int64)
    w = np.zeros(DS, np.int64)
    for j in range(DT):
        nz = False
        for b in range(DS):
            if A[j, b] != 0:
                nz = True
                break
        if not nz:
            continue
        for l in range(DT):
            nzb = False
            for b in range(DS):
                if B[l, b] != 0:
                    nzb = True
                    break
            if not nzb:
                continue
            for s in range(l + 1):
                t = j + s
                if t >= DT:
                    break
                # The box dtype guarantees these sums fit in int64, so one
                # reduction per sum suffices.
                for a in range(DS):
                    acc = 0
                    for b in range(a + 1):
                        acc += O[l, s, a, b] * A[j, b]
                    w[a] = acc % mod
                for c in range(DS):
                    acc = 0
                    for a in range(c + 1):
                        acc += w[a] * B[l, c - a]
                    C[t, c] = (C[t, c] + acc) % mod
    return C


def skew_product_numpy(A, B, O, mod):
    DT, DS = A.shape
    W = np.einsum("lsab,jb->jlsa", O, A) % mod
    lag = np.arange(DS)[:, None] - np.arange(DS)[None, :]
    TB = np.where(lag >= 0, B[:, np.clip(lag, 0, None)], 0)
    contrib = np.einsum("jlsa,lca->jsc", W, TB) % mod
    C = np.zeros((DT, DS), dtype=A.dtype)
    for j in range(DT):
        C[j:] += contrib[j, : DT - j]
    return C % mod


def skew_product(A, B, O, mod):
    if USE_NUMBA and A.dtype == np.int64:
        return skew_product_numba(A, B, O, mod)
    return skew_product_numpy(A, B, O, mod)


# ---------------------------------------------------------------------------
# Smith-type elimination over the local ring Z/p^N
#
# Returns the valuations of the pivots found, in elimination order.  Entries
# that are zero mod p^N are never pivots, so every returned valuation is < N.


@njit(cache=True)
def smith_valuations_numba(M, p, N):
    M = M.copy()
    r, c = M.shape
    mod = 1
    for _ in range(N):
        mod *= p
    kmax = min(r, c)
    vals = np.zeros(kmax, np.int64)
    k = 0
    while k < kmax:
        best = N
        bi = -1
        bj = -1
        for i in range(k, r):
            for j in range(k, c):
                x = M[i, j]
                if x != 0:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if v < best:
                        best = v
                        bi = i
                        bj = j
                        if v == 0:
                            break
            if best == 0:
                break
        if bi < 0:
            break
        if bi != k:
            for j in range(c):
                tmp = M[k, j]
                M[k, j] = M[bi, j]
                M[bi, j] = tmp
        if bj != k:
            for i in range(r):
                tmp = M[i, k]
                M[i, k] = M[i, bj]
                M[i, bj] = tmp
        pv = 1
        for _ in range(best):
            pv *= p
        inv = _modinv(M[k, k] // pv, mod)
        for i in range(k + 1, r):
            x = M[i, k]
            if x != 0:
                f = ((x // pv) * inv) % mod
                for j in range(k, c):
                    M[i, j] = (M[i, j] - f * M[k, j]) % mod
        vals[k] = best
        k += 1
    return vals[:k]


def _valuation_array(x, p, N):
    x = x.copy()
    v = np.full(x.shape, N, dtype=np.int64)
    live = (x != 0).astype(bool)
    v[live] = 0
    for _ in range(N):
        step = live & (x % p == 0).astype(bool)
        if not step.any():
            break
        x[step] //= p
        v[step] += 1
        live = step
    return v


def smith_valuations_numpy(M, p, N):
    M = M.copy()
    r, c = M.shape
    mod = p**N
    vals = []
    for k in range(min(r, c)):
        v = _valuation_array(M[k:, k:], p, N)
        flat = int(np.argmin(v))
        best = int(v.flat[flat])
        if best >= N:
            break
        bi, bj = divmod(flat, c - k)
        bi += k
        bj += k
        if bi != k:
            M[[k, bi]] = M[[bi, k]]
        if bj != k:
            M[:, [k, bj]] = M[:, [bj, k]]
        pv = p**best
        inv = pow(int(M[k, k]) // pv, -1, mod)
        f = ((M[k + 1 :, k] // pv) * inv) % mod
        M[k + 1 :, k:] = (M[k + 1 :, k:] - f[:, None] * M[k, k:][None, :]) % mod
        vals.append(best)
    return np.array(vals, dtype=np.int64)


def smith_valuations(M, p, N):
    if USE_NUMBA and M.dtype == np.int64:
        return smith_valuations_numba(M, p, N)
    return smith_valuations_numpy(M, p, N)


# ---------------------------------------------------------------------------
# determinant modulo a word-size prime (prime < 2**31)


@njit(cache=True)
def det_mod_prime_numba(M, prime):
    a = M % prime
    n = a.shape[0]
    det = 1
    for k in range(n):
        piv = -1
        for i in range(k, n):
            if a[i, k] != 0:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[piv, j]
                a[piv, j] = tmp
            det = (prime - det) % prime
        det = det * a[k, k] % prime
        inv = _modinv(a[k, k], prime)
        for i in range(k + 1, n):
            if a[i, k] != 0:
                f = a[i, k] * inv % prime
                for j in range(k, n):
                    a[i, j] = (a[i, j] - f * a[k, j]) % prime
    return det


def det_mod_prime_numpy(M, prime):
    a = np.asarray(M, dtype=np.int64) % prime
    n = a.shape[0]
    det = 1
    for k in range(n):
        nz = np.flatnonzero(a[k:, k])
        if nz.size == 0:
            return 0
        piv = k + int(nz[0])
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            det = -det
        pk = int(a[k, k])
        det = det * pk % prime
        inv = pow(pk, -1, prime)
        f = a[k + 1 :, k] * inv % prime
        a[k + 1 :, k:] = (a[k + 1 :, k:] - f[:, None] * a[k, k:][None, :]) % prime
    return det % prime


def det_mod_prime(M, prime):
    M = np.ascontiguousarray(M, dtype=np.int64)
    if USE_NUMBA:
        return int(det_mod_prime_numba(M, prime))
    return int(det_mod_prime_numpy(M, prime))
