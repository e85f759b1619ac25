"""Truncated arithmetic in the skew power series ring Z_p[[S, T; sigma, delta]].

Elements are stored in T-left canonical form ``sum c[j, i] T^j S^i`` as a
``(D_T, D_S)`` coefficient array over Z/p^N.  The box is parameterised by the
commutation exponent ``q = 1 + p*u`` of the group relation

    (1 + S)(1 + T) = (1 + T)(1 + S)^q,

so ``sigma`` substitutes ``S -> (1+S)^c - 1`` with ``c = q^-1`` (a p-adic unit)
and ``sigma^-1`` substitutes with the ordinary integer ``q``.

Truncation.  Dropping S-degrees >= D_S is a two-sided ideal (sigma and its
inverse preserve S-adic order), so every product is exact modulo S^D_S.
T-degrees are computed exactly inside one product and only the final result
is cut at D_T.  Chained products that exceed D_T must run in a larger box
(:meth:`TruncationBox.guard`) and be cut afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import BoxMismatchError, DomainError, ParameterError, TruncationError
from .padic import (
    ModularInt,
    centered,
    factorial_valuation,
    padic_binomial,
    require_odd_prime,
)


@dataclass(frozen=True)
class TruncationBox:
    """Coefficient precision and degree bounds for truncated elements.

    ``u`` fixes the commutation exponent q = 1 + p*u; it must be a unit mod p,
    so that q = 1 mod p and q != 1 mod p^2.
    """

    p: int
    N: int
    D_S: int
    D_T: int
    u: int = 1

    def __post_init__(self):
        require_odd_prime(self.p)
        if self.N < 1:
            raise ParameterError(f"precision N must be >= 1, got {self.N}")
        if self.D_S < 1 or self.D_T < 1:
            raise ParameterError(f"degree bounds must be >= 1, got ({self.D_S}, {self.D_T})")
        if self.u % self.p == 0:
            raise ParameterError(f"u = {self.u} must be coprime to p = {self.p}")

    @classmethod
    def from_q(cls, p: int, q: int, N: int, D_S: int, D_T: int) -> TruncationBox:
        if (q - 1) % p:
            raise ParameterError(f"q = {q} is not 1 mod {p}")
        return cls(p, N, D_S, D_T, (q - 1) // p)

    @property
    def q(self) -> int:
        return 1 + self.p * self.u

    @property
    def modulus(self) -> int:
        return self.p**self.N

    @property
    def dtype(self):
        # products sum over at most D_S * D_T terms
        return _kernels.coefficient_dtype(self.modulus, self.D_S * self.D_T)

    def with_(self, **changes) -> TruncationBox:
        return replace(self, **changes)

    def guard(self, factor: int = 2) -> TruncationBox:
        """Box with both degree bounds multiplied by ``factor``."""
        return replace(self, D_S=self.D_S * factor, D_T=self.D_T * factor)

    def reduction_box(self, m: int) -> TruncationBox:
        """Smallest widening in which reduction modulo omega_m is exact.

        Modulo omega_m every S^k with k >= a*p^m is divisible by p^a, so an
        S-bound of N*p^m loses nothing mod p^N.
        """
        return replace(self, D_S=max(self.D_S, self.N * self.p**m))

    def same_ring(self, other: TruncationBox) -> bool:
        return (self.p, self.u) == (other.p, other.u)


def _check_box(a: SkewElement, b: SkewElement) -> None:
    if a.box != b.box:
        raise BoxMismatchError(f"elements live in different boxes: {a.box} vs {b.box}")


def _zeros(box: TruncationBox, shape) -> np.ndarray:
    return np.zeros(shape, dtype=box.dtype)


_as_int = np.frompyfunc(int, 1, 1)


def _to_array(box: TruncationBox, values) -> np.ndarray:
    """Reduce ``values`` mod p^N into the box's storage dtype."""
    arr = np.asarray(values)
    if arr.dtype == object or box.dtype is object:
        arr = _as_int(np.array(arr, dtype=object)) % box.modulus
        return arr if box.dtype is object else arr.astype(np.int64)
    return arr.astype(np.int64) % box.modulus


class SkewElement:
    """Immutable truncated element of Lambda(G) in T-left canonical form."""

    __slots__ = ("box", "array")

    def __init__(self, box: TruncationBox, array: np.ndarray):
        if array.shape != (box.D_T, box.D_S):
            raise ParameterError(
                f"coefficient array shape {array.shape} does not match box ({box.D_T}, {box.D_S})"
            )
        arr = _to_array(box, array)
        arr.setflags(write=False)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "array", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SkewElement is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, box: TruncationBox) -> SkewElement:
        return cls(box, _zeros(box, (box.D_T, box.D_S)))

    @classmethod
    def from_terms(cls, box: TruncationBox, terms: dict[tuple[int, int], int]) -> SkewElement:
        """Build from ``{(j, i): c}`` meaning ``c T^j S^i``; out-of-box terms are dropped."""
        arr = _zeros(box, (box.D_T, box.D_S))
        for (j, i), c in terms.items():
            if j < 0 or i < 0:
                raise ParameterError(f"negative exponent in term {(j, i)}")
            if j < box.D_T and i < box.D_S:
                arr[j, i] = (arr[j, i] + int(c)) % box.modulus
        return cls(box, arr)

    @classmethod
    def constant(cls, box: TruncationBox, c: int) -> SkewElement:
        return cls.from_terms(box, {(0, 0): c})

    @classmethod
    def one(cls, box: TruncationBox) -> SkewElement:
        return cls.constant(box, 1)

    @classmethod
    def S(cls, box: TruncationBox) -> SkewElement:
        return cls.from_terms(box, {(0, 1): 1})

    @classmethod
    def T(cls, box: TruncationBox) -> SkewElement:
        return cls.from_terms(box, {(1, 0): 1})

    @classmethod
    def from_s_poly(cls, box: TruncationBox, coeffs) -> SkewElement:
        return cls.from_terms(box, {(0, i): c for i, c in enumerate(coeffs)})

    @classmethod
    def from_t_poly(cls, box: TruncationBox, coeffs) -> SkewElement:
        return cls.from_terms(box, {(j, 0): c for j, c in enumerate(coeffs)})

    @classmethod
    def from_records(cls, box: TruncationBox, records) -> SkewElement:
        """Inverse of :meth:`to_records`; repeated monomials are summed."""
        terms: dict[tuple[int, int], int] = {}
        for rec in records:
            key = (int(rec["t"]), int(rec["s"]))
            terms[key] = terms.get(key, 0) + int(rec["c"])
        return cls.from_terms(box, terms)

    # -- views ------------------------------------------------------------

    @property
    def coeffs(self) -> dict[tuple[int, int], ModularInt]:
        """Nonzero coefficients as ``{(j, i): ModularInt}``."""
        box = self.box
        return {
            (int(j), int(i)): ModularInt(box.p, box.N, int(self.array[j, i]))
            for j, i in zip(*np.nonzero(self.array))
        }

    def coefficient(self, j: int, i: int) -> ModularInt:
        box = self.box
        c = int(self.array[j, i]) if j < box.D_T and i < box.D_S else 0
        return ModularInt(box.p, box.N, c)

    def to_records(self) -> list[dict[str, int]]:
        return [{"t": j, "s": i, "c": c.residue} for (j, i), c in sorted(self.coeffs.items())]

    def is_zero(self) -> bool:
        return not np.any(self.array != 0)

    def has_t_part(self) -> bool:
        return bool(np.any(self.array[1:] != 0))

    def t_degree(self) -> int:
        rows = np.nonzero(np.any(self.array != 0, axis=1))[0]
        return int(rows[-1]) if rows.size else -1

    def s_degree(self) -> int:
        cols = np.nonzero(np.any(self.array != 0, axis=0))[0]
        return int(cols[-1]) if cols.size else -1

    def s_poly(self) -> list[int]:
        """Coefficients of the T^0 row (the Lambda(H) part)."""
        return [int(x) for x in self.array[0]]

    # -- box changes ------------------------------------------------------

    def to_box(self, box: TruncationBox) -> SkewElement:
        """Re-express in another box of the same ring.

        Degrees are cut or zero-padded.  Raising N lifts each residue by its
        centred representative, which is exact for integral presentations
        with small coefficients and otherwise only a choice of lift.
        """
        if not self.box.same_ring(box):
            raise BoxMismatchError(f"cannot move between rings {self.box} and {box}")
        src = self.array
        if box.N > self.box.N:
            src = np.vectorize(lambda x: centered(int(x), self.box.modulus), otypes=[object])(src)
        arr = np.zeros((box.D_T, box.D_S), dtype=object)
        dt, ds = min(box.D_T, self.box.D_T), min(box.D_S, self.box.D_S)
        arr[:dt, :ds] = src[:dt, :ds]
        return SkewElement(box, arr)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = SkewElement.constant(self.box, other)
        if not isinstance(other, SkewElement):
            return NotImplemented
        _check_box(self, other)
        return SkewElement(self.box, (self.array + other.array) % self.box.modulus)

    __radd__ = __add__

    def __neg__(self):
        return SkewElement(self.box, (-self.array) % self.box.modulus)

    def __sub__(self, other):
        if isinstance(other, int):
            other = SkewElement.constant(self.box, other)
        if not isinstance(other, SkewElement):
            return NotImplemented
        _check_box(self, other)
        return SkewElement(self.box, (self.array - other.array) % self.box.modulus)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> SkewElement:
        return SkewElement(self.box, (self.array * (int(c) % self.box.modulus)) % self.box.modulus)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, SkewElement):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> SkewElement:
        if k < 0:
            raise ParameterError("negative powers are not supported")
        out = SkewElement.one(self.box)
        for _ in range(k):
            out = mul(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, SkewElement):
            return NotImplemented
        return self.box == other.box and bool(np.all(self.array == other.array))

    def __hash__(self):
        return hash((self.box, tuple(int(x) for x in self.array.ravel())))

    def __repr__(self):
        if self.is_zero():
            return f"SkewElement(0; p={self.box.p}, N={self.box.N})"
        parts = []
        for (j, i), c in sorted(self.coeffs.items()):
            mono = "".join(
                [f"T^{j}" if j > 1 else ("T" if j == 1 else ""), f"S^{i}" if i > 1 else ("S" if i == 1 else "")]
            )
            parts.append(f"{c.residue}{'*' + mono if mono else ''}")
        return f"SkewElement({' + '.join(parts)}; p={self.box.p}, N={self.box.N})"


# ---------------------------------------------------------------------------
# one-variable helpers on Python-int coefficient lists


def _poly_mul_trunc(a, b, D: int, mod: int) -> list[int]:
    out = [0] * D
    for i, x in enumerate(a[:D]):
        if x:
            for k, y in enumerate(b[: D - i]):
                if y:
                    out[i + k] = (out[i + k] + x * y) % mod
    return out


def _binomial_series(exponent: int, D: int, mod: int) -> list[int]:
    """(1 + X)^exponent truncated, for an integer exponent >= 0."""
    return [math.comb(exponent, i) % mod for i in range(D)]


def _substitution_matrix(first_power: list[int], D: int, mod: int) -> list[list[int]]:
    """Column i holds the coefficients of g^i, where g = sum first_power[k] X^k."""
    cols = [[1] + [0] * (D - 1)]
    for _ in range(1, D):
        cols.append(_poly_mul_trunc(cols[-1], first_power, D, mod))
    return [[cols[i][a] for i in range(D)] for a in range(D)]


def _apply_matrix(mat, vec, mod: int) -> list[int]:
    return [sum(row[b] * vec[b] for b in range(len(vec)) if row[b]) % mod for row in mat]


def _sigma_exponent(box: TruncationBox, power: int) -> tuple[int, int]:
    """(c^power mod p^prec, prec) where c = q^-1, with guard digits for D_S binomials."""
    prec = box.N + factorial_valuation(box.D_S - 1, box.p)
    c = pow(box.q, -1, box.p**prec)
    return pow(c, power, box.p**prec), prec


def _substitution_series(box: TruncationBox, k: int) -> list[int]:
    """Coefficients of sigma^k(S) = (1+S)^(c^k) - 1, for any integer k."""
    D, mod = box.D_S, box.modulus
    if k <= 0:
        series = _binomial_series(box.q ** (-k), D, mod)
    else:
        e, prec = _sigma_exponent(box, k)
        series = [padic_binomial(e, i, box.p, box.N, c_precision=prec).residue for i in range(D)]
    series[0] = 0
    return series


@lru_cache(maxsize=256)
def _substitution(box: TruncationBox, k: int):
    return _substitution_matrix(_substitution_series(box, k), box.D_S, box.modulus)


@lru_cache(maxsize=64)
def product_tensor(box: TruncationBox) -> np.ndarray:
    """O[l, s] = binom(l, s) tau^s (tau - 1)^(l - s), tau = sigma^-1, as D_S x D_S matrices.

    F(S) T^l = sum_s T^s O[l, s] F follows from F (1+T) = (1+T) tau(F).
    """
    D, DT, mod = box.D_S, box.D_T, box.modulus
    dtype = box.dtype
    tau = np.array(_substitution(box, -1), dtype=dtype)
    eye = np.eye(D, dtype=np.int64).astype(dtype)
    diff = (tau - eye) % mod
    tau_pows = [eye]
    diff_pows = [eye]
    for _ in range(1, DT):
        tau_pows.append(tau_pows[-1].dot(tau) % mod)
        diff_pows.append(diff_pows[-1].dot(diff) % mod)
    O = np.zeros((DT, DT, D, D), dtype=dtype)
    for l in range(DT):
        for s in range(l + 1):
            O[l, s] = (math.comb(l, s) % mod) * (tau_pows[s].dot(diff_pows[l - s]) % mod) % mod
    O.setflags(write=False)
    return O


# ---------------------------------------------------------------------------
# ring operations


def add(a: SkewElement, b: SkewElement) -> SkewElement:
    return a + b


def mul(a: SkewElement, b: SkewElement) -> SkewElement:
    """Ring product in canonical form, cut to the common box."""
    _check_box(a, b)
    box = a.box
    O = product_tensor(box)
    C = _kernels.skew_product(np.ascontiguousarray(a.array), np.ascontiguousarray(b.array), O, box.modulus)
    return SkewElement(box, C)


def sigma_power_apply(F: SkewElement, k: int) -> SkewElement:
    """sigma^k applied to an element of Lambda(H); k may be negative."""
    if F.has_t_part():
        raise DomainError("sigma is only defined on elements without T-part")
    box = F.box
    if k == 0:
        return F
    image = _apply_matrix(_substitution(box, k), F.s_poly(), box.modulus)
    return SkewElement.from_s_poly(box, image)


def sigma_apply(F: SkewElement) -> SkewElement:
    """S -> (1+S)^c - 1 with c = q^-1 taken to N + v_p((D_S-1)!) digits."""
    return sigma_power_apply(F, 1)


def sigma_inverse_apply(F: SkewElement) -> SkewElement:
    return sigma_power_apply(F, -1)


def delta_apply(F: SkewElement) -> SkewElement:
    return sigma_apply(F) - F


def group_word(box: TruncationBox, j: int, i: int) -> SkewElement:
    """Canonical form of (1+T)^j (1+S)^i."""
    if j < 0 or i < 0:
        raise ParameterError("group_word exponents must be >= 0")
    mod = box.modulus
    tcol = _binomial_series(j, box.D_T, mod)
    srow = _binomial_series(i, box.D_S, mod)
    arr = np.array([[x * y % mod for y in srow] for x in tcol], dtype=object)
    return SkewElement(box, arr)


def omega_coeffs(p: int, m: int) -> list[int]:
    """Integer coefficients of (1+X)^(p^m) - 1, degree p^m."""
    series = [math.comb(p**m, i) for i in range(p**m + 1)]
    series[0] = 0
    return series


def omega(box: TruncationBox, m: int, var: str = "S") -> SkewElement:
    """(1 + var)^(p^m) - 1, stored exactly."""
    if m < 0:
        raise ParameterError("level m must be >= 0")
    bound = {"S": box.D_S, "T": box.D_T}.get(var)
    if bound is None:
        raise ParameterError(f"var must be 'S' or 'T', got {var!r}")
    if box.p**m >= bound:
        raise TruncationError(f"omega_{m}({var}) has degree {box.p**m}, box bound is {bound}")
    coeffs = omega_coeffs(box.p, m)
    if var == "S":
        return SkewElement.from_s_poly(box, coeffs)
    return SkewElement.from_t_poly(box, coeffs)


def xi_coeffs(p: int, m: int) -> list[int]:
    """omega_m / omega_(m-1) = sum_(k<p) (1+X)^(k p^(m-1)); xi_0 = X."""
    if m == 0:
        return [0, 1]
    step = p ** (m - 1)
    out = [0] * ((p - 1) * step + 1)
    for k in range(p):
        for i in range(k * step + 1):
            out[i] += math.comb(k * step, i)
    return out


def xi(box: TruncationBox, m: int) -> SkewElement:
    coeffs = xi_coeffs(box.p, m)
    if len(coeffs) > box.D_S:
        raise TruncationError(f"xi_{m} has degree {len(coeffs) - 1}, box D_S is {box.D_S}")
    return SkewElement.from_s_poly(box, coeffs)


# ---------------------------------------------------------------------------
# reduction modulo Lambda(G) omega_m(S)


@dataclass(frozen=True, eq=False)
class GammaCoordinates:
    """Coordinates (F_0(T), ..., F_(p^m - 1)(T)) of an element of Lambda/Lambda omega_m.

    ``coords[i, j]`` is the coefficient of T^j in F_i; coordinate i multiplies S^i.
    """

    box: TruncationBox
    m: int
    coords: np.ndarray

    def __post_init__(self):
        if self.coords.shape != (self.box.p**self.m, self.box.D_T):
            raise ParameterError(f"expected {self.box.p ** self.m} coordinates of length {self.box.D_T}")

    def lift(self) -> SkewElement:
        """The representative sum F_i(T) S^i."""
        arr = _zeros(self.box, (self.box.D_T, self.box.D_S))
        arr[:, : self.coords.shape[0]] = self.coords.T
        return SkewElement(self.box, arr)

    def left_multiply(self, G) -> GammaCoordinates:
        """Coordinatewise product G(T) * F_i(T), cut at D_T."""
        mod, D = self.box.modulus, self.box.D_T
        g = [int(x) % mod for x in G][:D]
        rows = [_poly_mul_trunc(g, [int(x) for x in row], D, mod) for row in self.coords]
        return GammaCoordinates(self.box, self.m, _to_array(self.box, rows))

    def is_zero(self) -> bool:
        return not np.any(self.coords != 0)

    def __eq__(self, other):
        if not isinstance(other, GammaCoordinates):
            return NotImplemented
        return self.box == other.box and self.m == other.m and bool(np.all(self.coords == other.coords))

    def tolist(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.coords]


def _s_remainder(arr: np.ndarray, m: int, p: int, mod: int) -> np.ndarray:
    """Row-wise remainder of S-polynomials modulo the monic omega_m(S)."""
    P = p**m
    R = np.array(arr, dtype=object)
    w = omega_coeffs(p, m)[:P]
    low = np.array(w, dtype=object)
    for deg in range(R.shape[1] - 1, P - 1, -1):
        lead = R[:, deg].copy()
        if not np.any(lead != 0):
            continue
        # S^deg = S^(deg-P) * (omega_m - sum_(k<P) w_k S^k)
        R[:, deg - P : deg] = (R[:, deg - P : deg] - np.outer(lead, low)) % mod
        R[:, deg] = 0
    return R[:, :P] % mod


def reduce_mod_omega_S(r: SkewElement, m: int) -> GammaCoordinates:
    """Normal form of r modulo the left ideal Lambda omega_m(S).

    The top S-degree is rewritten first until all degrees are < p^m.  The
    result is exact for the polynomial ``r``; it equals the reduction of the
    untruncated element whenever r's box has D_S >= N*p^m.
    """
    box = r.box
    if box.p**m > box.D_S:
        raise TruncationError(f"p^m = {box.p ** m} exceeds D_S = {box.D_S}")
    R = _s_remainder(r.array, m, box.p, box.modulus)
    return GammaCoordinates(box, m, _to_array(box, R.T))


def t_remainder(coeffs, n: int, p: int, mod: int) -> list[int]:
    """Remainder of a T-polynomial modulo omega_n(T), length p^n."""
    P = p**n
    R = [int(x) % mod for x in coeffs] + [0] * max(0, P - len(coeffs))
    w = omega_coeffs(p, n)[:P]
    for deg in range(len(R) - 1, P - 1, -1):
        lead = R[deg]
        if lead:
            for k in range(P):
                if w[k]:
                    R[deg - P + k] = (R[deg - P + k] - lead * w[k]) % mod
            R[deg] = 0
    return R[:P]
