"""Small number-theoretic helpers used across the package."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

import numpy as np
from sympy import divisors, factorint, isprime, jacobi_symbol, mobius

__all__ = [
    "valuation",
    "primes_upto",
    "prime_divisors",
    "is_squarefree",
    "is_square",
    "legendre_array",
    "big_omega",
    "largest_prime_factor",
    "jacobi",
    "mobius",
    "divisors",
    "isprime",
    "gcd",
]


def valuation(n, p: int) -> int:
    """p-adic valuation of a nonzero integer (or Fraction)."""
    if n == 0:
        raise ValueError("valuation of 0")
    num = getattr(n, "numerator", n)
    den = getattr(n, "denominator", 1)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@lru_cache(maxsize=8)
def _prime_array(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_upto(limit: int) -> np.ndarray:
    return _prime_array(int(limit))


def prime_divisors(n: int) -> list[int]:
    return sorted(factorint(abs(n))) if abs(n) > 1 else []


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorint(abs(n)).values())


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def jacobi(a: int, n: int) -> int:
    return int(jacobi_symbol(a % n, n))


def legendre_array(a: int, primes: np.ndarray) -> np.ndarray:
    """Legendre symbols (a/p) for an array of odd primes, vectorised.

    Euler's criterion with square-and-multiply in int64; primes must stay
    below ~3e9 so that products fit.
    """
    base = np.mod(a, primes).astype(np.int64)
    exp = (primes - 1) // 2
    result = np.ones_like(primes)
    while np.any(exp > 0):
        odd = (exp & 1) == 1
        result = np.where(odd, (result * base) % primes, result)
        base = (base * base) % primes
        exp >>= 1
    out = np.where(result == primes - 1, -1, result)
    return np.where(np.mod(a, primes) == 0, 0, out)


def big_omega(n: int) -> int:
    """Number of prime factors counted with multiplicity; Omega(1) = 0."""
    n = abs(n)
    if n <= 1:
        return 0
    return sum(factorint(n).values())


def largest_prime_factor(n: int) -> int:
    n = abs(n)
    return max(factorint(n)) if n > 1 else 1
