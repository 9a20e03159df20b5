import math

from hypothesis import given, strategies as st
from sympy import factorint, jacobi_symbol

from thetanorm.arith import (big_omega, is_square, is_squarefree, jacobi, largest_prime_factor,
                             legendre_array, prime_divisors, primes_upto, valuation)


def test_valuation_of_fraction_and_int():
    from fractions import Fraction

    assert valuation(48, 2) == 4
    assert valuation(Fraction(9, 8), 2) == -3
    assert valuation(Fraction(9, 8), 3) == 2


def test_primes_upto_small():
    assert list(primes_upto(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(st.integers(1, 10**6))
def test_factor_helpers_match_sympy(n):
    f = factorint(n)
    assert prime_divisors(n) == sorted(f)
    assert big_omega(n) == sum(f.values())
    assert is_squarefree(n) == all(e == 1 for e in f.values())
    assert is_square(n) == (math.isqrt(n) ** 2 == n)
    if n > 1:
        assert largest_prime_factor(n) == max(f)


@given(st.integers(-500, 500), st.integers(0, 300).map(lambda k: 2 * k + 1))
def test_jacobi_matches_sympy(a, n):
    assert jacobi(a, n) == jacobi_symbol(a, n)


def test_legendre_array():
    ps = primes_upto(60)[1:]
    got = legendre_array(-1, ps)
    assert list(got) == [1 if p % 4 == 1 else -1 for p in ps]
