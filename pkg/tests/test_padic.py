import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zpzp.errors import NonUnitError, ParameterError, PrecisionError
from zpzp.padic import (
    ModularInt,
    factorial_valuation,
    is_prime,
    mod_add,
    mod_inv,
    mod_mul,
    mod_neg,
    mult_order,
    padic_binomial,
    require_odd_prime,
    valuation,
)

primes = st.sampled_from([3, 5, 7, 11])


def z9(x):
    return ModularInt(3, 2, x)


def test_mod_examples():
    assert mod_add(z9(4), z9(7)).residue == 2
    assert mod_inv(z9(4)).residue == 7
    assert mod_mul(z9(8), z9(8)).residue == 1
    assert mod_neg(z9(4)).residue == 5


def test_residue_is_reduced():
    assert ModularInt(3, 2, -1).residue == 8
    assert ModularInt(3, 2, 100).residue == 1


@pytest.mark.parametrize("p", [2, 4, 9, 1, 0, -3])
def test_rejects_bad_primes(p):
    with pytest.raises(ParameterError):
        ModularInt(p, 2, 1)
    with pytest.raises(ParameterError):
        require_odd_prime(p)


def test_mismatched_precision_is_rejected():
    with pytest.raises(ParameterError):
        mod_add(ModularInt(3, 2, 1), ModularInt(3, 3, 1))
    with pytest.raises(ParameterError):
        mod_mul(ModularInt(3, 2, 1), ModularInt(5, 2, 1))


def test_inverse_of_non_unit():
    with pytest.raises(NonUnitError):
        mod_inv(z9(3))
    with pytest.raises(NonUnitError):
        z9(0).inverse()


@given(primes, st.integers(1, 6), st.integers())
def test_inverse_is_involution(p, N, x):
    a = ModularInt(p, N, x)
    if a.is_unit():
        assert mod_inv(mod_inv(a)) == a
        assert (mod_inv(a) * a).residue == 1


@given(primes, st.integers(1, 5), st.integers(), st.integers(), st.integers())
def test_ring_axioms(p, N, x, y, z):
    a, b, c = (ModularInt(p, N, v) for v in (x, y, z))
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a + (-a) == ModularInt(p, N, 0)
    assert (a - b).residue == (x - y) % p**N


def test_valuation_examples():
    assert valuation(18, 3) == 2
    assert valuation(5, 3) == 0
    assert valuation(0, 3) == math.inf
    assert valuation(-27, 3) == 3


@given(primes, st.integers(0, 8), st.integers(1, 10**6))
def test_valuation_property(p, k, unit):
    if unit % p == 0:
        return
    assert valuation(unit * p**k, p) == k


def test_factorial_valuation_matches_direct_count():
    for p in (3, 5):
        for i in range(60):
            assert factorial_valuation(i, p) == valuation(math.factorial(i), p)


def test_mult_order_examples():
    assert mult_order(4, 3, 2) == 3
    assert mult_order(4, 3, 1) == 1
    assert mult_order(6, 5, 2) == 5
    with pytest.raises(ParameterError):
        mult_order(6, 3, 2)


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_mult_order_of_one_plus_pu(p, n):
    for u in range(1, 3 * p):
        if u % p:
            assert mult_order(1 + p * u, p, n) == p ** (n - 1)


def test_mult_order_against_brute_force():
    for p in (3, 5, 7):
        for n in (1, 2, 3):
            mod = p**n
            for q in range(1, mod):
                if q % p:
                    k = 1
                    while pow(q, k, mod) != 1:
                        k += 1
                    assert mult_order(q, p, n) == k


def test_padic_binomial_examples():
    assert padic_binomial(4, 2, 3, 2).residue == 6
    assert padic_binomial(-1, 3, 3, 2).residue == 8
    assert padic_binomial(7, 2, 3, 2).residue == 3


def test_padic_binomial_precision_guard():
    # c known only mod 3^2 cannot determine binom(c, 3) mod 3^2: 3! carries a factor 3.
    with pytest.raises(PrecisionError):
        padic_binomial(8, 3, 3, 2, c_precision=2)
    assert padic_binomial(26, 3, 3, 2, c_precision=3).residue == 8


@given(primes, st.integers(1, 5), st.integers(-(10**6), 10**6), st.integers(0, 30))
def test_padic_binomial_matches_rational_binomial(p, N, c, i):
    exact = Fraction(math.prod(c - k for k in range(i)), math.factorial(i))
    assert exact.denominator == 1
    assert padic_binomial(c, i, p, N).residue == int(exact) % p**N


@given(primes, st.integers(1, 4), st.integers(-500, 500), st.integers(-500, 500), st.integers(0, 12))
def test_vandermonde(p, N, a, b, k):
    lhs = sum((padic_binomial(a, i, p, N) * padic_binomial(b, k - i, p, N)).residue for i in range(k + 1))
    assert lhs % p**N == padic_binomial(a + b, k, p, N).residue


@pytest.mark.parametrize("p,m", [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1)])
def test_binomial_of_prime_power(p, m):
    N = 4
    for j in range(p**m + 1):
        assert padic_binomial(p**m, j, p, N).residue == math.comb(p**m, j) % p**N


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
