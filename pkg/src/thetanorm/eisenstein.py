"""Genus coefficients r(gen Q, n) from local densities, and related checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import divisors, is_square, prime_divisors, primes_upto
from .errors import DimensionTooSmall
from .forms import QuadForm
from .padic import DensityProduct, density, density_product, jordan_decompose, local_primes


@dataclass
class GenusCoefficient:
    n: int
    value: float
    archimedean: float
    finite_part: DensityProduct
    convergence_flag: str

    def to_json(self) -> dict:
        return {"n": self.n, "value": self.value, "prefactor": self.archimedean,
                "finite_part": self.finite_part.to_json(),
                "convergence_flag": self.convergence_flag}


def archimedean_factor(form: QuadForm, n: int) -> float:
    m = form.m
    log = (m / 2) * math.log(2 * math.pi) + (m / 2 - 1) * math.log(n) \
        - math.lgamma(m / 2) - 0.5 * math.log(form.det)
    return math.exp(log)


def genus_coefficient(form: QuadForm, n: int, cutoff: int = 10**5) -> GenusCoefficient:
    if form.m < 3:
        raise DimensionTooSmall("genus coefficients need m >= 3")
    if n < 1:
        raise ValueError("n must be positive")
    arch = archimedean_factor(form, n)
    fin = density_product(form, n, cutoff)
    flag = "oscillatory" if form.m == 3 else "clean"
    return GenusCoefficient(n, arch * fin.value, arch, fin, flag)


def genus_series(form: QuadForm, X: int, cutoff: int = 10**4) -> np.ndarray:
    """r(gen Q, n) for 0 <= n <= X (index 0 holds the constant term 1).

    Same Euler product as genus_coefficient, evaluated for all n at once:
    the unramified factors are accumulated prime by prime over the whole
    range of n.
    """
    m = form.m
    if m < 3:
        raise DimensionTooSmall("genus coefficients need m >= 3")
    ns = np.arange(1, X + 1)
    bad = set(prime_divisors(2 * form.level))
    det_a = Fraction(form.det, 2 ** m)
    c0 = det_a.numerator * det_a.denominator
    logs = np.zeros(X)
    for p in primes_upto(cutoff):
        p = int(p)
        if p in bad:
            continue
        table = -np.ones(p)
        table[(np.arange(p) ** 2) % p] = 1.0
        table[0] = 0.0
        if m % 2:
            arg = ((-1) ** ((m - 1) // 2) * c0 * ns) % p
            logs += np.log1p(table[arg] / p ** ((m - 1) // 2))
        else:
            chi = table[((-1) ** (m // 2) * c0) % p]
            term = np.log1p(-chi / p ** (m // 2))
            logs += np.where(ns % p == 0, 0.0, term)
    arch = np.exp((m / 2) * math.log(2 * math.pi) + (m / 2 - 1) * np.log(ns)
                  - math.lgamma(m / 2) - 0.5 * math.log(form.det))
    out = np.empty(X + 1)
    out[0] = 1.0
    for n in range(1, X + 1):
        ram = 1.0
        for p in sorted(bad | set(prime_divisors(n))):
            ram *= float(density(form, p, n).value)
            if ram == 0.0:
                break
        out[n] = arch[n - 1] * ram * math.exp(logs[n - 1])
    return out


def genus_upper_bound(form: QuadForm, n: int, epsilon: float = 0.0, constant: float = 1.0) -> float:
    """constant * n^(m/2-1) (n, N)^(1/2) det(Q)^(-1/2) (nN)^epsilon."""
    if epsilon < 0 or constant <= 0:
        raise ValueError("need epsilon >= 0 and constant > 0")
    m, big_n = form.m, form.level
    return (constant * n ** (m / 2 - 1) * math.sqrt(math.gcd(n, big_n))
            / math.sqrt(form.det) * (n * big_n) ** epsilon)


@dataclass(frozen=True)
class SpinorCheck:
    applies: bool
    reason: str

    def to_json(self) -> dict:
        return {"applies": self.applies, "reason": self.reason}


def exceptional_square_classes(form: QuadForm, n: int) -> list[int]:
    """The t with 4t | N and n / t a perfect square."""
    big_n = form.level
    if big_n % 4:
        return []
    return [t for t in divisors(big_n // 4) if n % t == 0 and is_square(n // t)]


def gen_eq_spn_check(form: QuadForm, n: int) -> SpinorCheck:
    """Sufficient conditions for r(spn Q, n) = r(gen Q, n)."""
    if not exceptional_square_classes(form, n):
        return SpinorCheck(True, "bullet1")
    if form.m == 3:
        ok = True
        for p in local_primes(form):
            jd = jordan_decompose(form, p)
            scales = jd.nu
            if p == 2:
                ok = jd.r2 == 0 and len(set(scales)) == 1
            else:
                ok = len(set(scales)) < 3
            if not ok:
                break
        if ok:
            return SpinorCheck(True, "bullet2")
    return SpinorCheck(False, "none")
