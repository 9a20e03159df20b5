"""Sieve weights, the inclusion-exclusion identity, the m(zeta) majorant,
and desk-scale searches for almost-prime and smooth representations by
x1^2 + x2^2 + x3^2.

Counts of solutions are signed-vector counts, eight times the count of
positive solutions (no coordinate vanishes when n = 3 mod 8).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar
from sympy import factorint, mobius
from sympy.solvers.diophantine.diophantine import sum_of_squares

from .arith import is_squarefree, jacobi, largest_prime_factor, primes_upto
from .errors import BudgetExceeded, DensityZeroDenominator, EmptyWindow
from .forms import QuadForm, diagonal_form
from .lattice import count_representations, representations_list
from .padic import density, density_product


@dataclass(frozen=True)
class SieveConfig:
    tau: Fraction = Fraction(3, 58)
    beta3: float = 6.6408
    n: int | None = None

    def __post_init__(self):
        if not 0 < self.tau < 1:
            raise ValueError("tau must lie in (0, 1)")
        if self.beta3 <= 0:
            raise ValueError("beta3 must be positive")
        if self.n is not None and not admissible(self.n):
            raise ValueError("n must be 3 mod 24 and prime to 5")


@dataclass
class SieveReport:
    omega_table: dict = field(default_factory=dict)
    Omega_table: dict = field(default_factory=dict)
    X: float | None = None
    identity_checks: list = field(default_factory=list)
    zeta_star: float | None = None
    m_star: float | None = None
    r_conclusion: int | None = None
    survey: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "omega_table": {",".join(map(str, k)): str(v) for k, v in self.omega_table.items()},
            "Omega_table": {str(k): str(v) for k, v in self.Omega_table.items()},
            "X": self.X,
            "identity_checks": [list(c) for c in self.identity_checks],
            "zeta_star": self.zeta_star, "m_star": self.m_star,
            "r_conclusion": self.r_conclusion,
            "survey": {str(k): v for k, v in self.survey.items()},
        }


def admissible(n: int) -> bool:
    return n % 24 == 3 and n % 5 != 0


def _mu(n: int) -> int:
    return int(mobius(n))


def _q_l(l) -> QuadForm:
    return diagonal_form([x * x for x in l])


THREE_SQUARES = diagonal_form([1, 1, 1])


# ----------------------------------------------------------------------
# weights
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def omega_weight(l: tuple[int, int, int], n: int) -> Fraction:
    """Ratio of the local densities of Q_l and Q_1 at n, over p | 2 l1 l2 l3."""
    l = tuple(int(x) for x in l)
    if len(l) != 3 or any(x < 1 or not is_squarefree(x) for x in l):
        raise ValueError("l must be a triple of squarefree positive integers")
    primes = set(factorint(2 * l[0] * l[1] * l[2]))
    ql = _q_l(l)
    out = Fraction(1)
    for p in sorted(primes):
        den = density(THREE_SQUARES, p, n).value
        if den == 0:
            raise DensityZeroDenominator(f"beta_{p}(n) vanishes for x^2+y^2+z^2")
        out *= Fraction(density(ql, p, n).value) / Fraction(den)
    return out


def triples_with_lcm(d: int):
    """All triples of divisors of d whose lcm is d."""
    divs = [k for k in range(1, d + 1) if d % k == 0]
    for l in itertools.product(divs, repeat=3):
        if math.lcm(*l) == d:
            yield l


def Omega_of_d(d: int, n: int) -> Fraction:
    """d mu(d) sum over lcm(l) = d of mu(l) omega(l, n) / (l1 l2 l3)."""
    if d < 1 or not is_squarefree(d):
        raise ValueError("d must be squarefree")
    s = Fraction(0)
    for l in triples_with_lcm(d):
        s += _mu(l[0]) * _mu(l[1]) * _mu(l[2]) * omega_weight(l, n) / (l[0] * l[1] * l[2])
    return d * _mu(d) * s


def Omega_multiplicative(d: int, n: int) -> Fraction:
    """Omega(d) assembled as d times the product of Omega(p)/p over p | d."""
    out = Fraction(d)
    for p in factorint(d):
        out *= Omega_of_d(p, n) / p
    return out


# ----------------------------------------------------------------------
# the identity and the main term
# ----------------------------------------------------------------------

def sieve_identity_check(n: int, d: int, budget: int = 10**7) -> tuple[int, int, bool]:
    if n % 8 != 3:
        raise ValueError("n must be 3 mod 8")
    if d < 1 or not is_squarefree(d):
        raise ValueError("d must be squarefree")
    reps = representations_list(THREE_SQUARES, n, budget=budget)
    lhs = sum(1 for x in reps if (x[0] * x[1] * x[2]) % d == 0)
    rhs = 0
    for l in triples_with_lcm(d):
        mu = _mu(l[0]) * _mu(l[1]) * _mu(l[2])
        if mu:
            rhs += mu * count_representations(_q_l(l), n, budget=budget)
    rhs *= _mu(d)
    return lhs, rhs, lhs == rhs


def main_term_X(n: int, cutoff: int = 10**5) -> float:
    """(pi/4) sqrt(n) times the density product of x^2+y^2+z^2 at n."""
    return math.pi / 4 * math.sqrt(n) * density_product(THREE_SQUARES, n, cutoff).value


# ----------------------------------------------------------------------
# the majorant
# ----------------------------------------------------------------------

def m_of_zeta(zeta, tau: float, beta3: float):
    zeta = np.asarray(zeta, dtype=float)
    return (3 / tau * (1 + zeta) - 1 + (3 + zeta) * np.log(beta3 / zeta) - 3
            - zeta * 3 * (1 / tau - 1) / beta3)


@dataclass(frozen=True)
class Optimum:
    zeta_star: float
    m_star: float
    r_conclusion: int
    grid_zeta: float
    grid_m: float

    def to_json(self) -> dict:
        return {"zeta": self.zeta_star, "m": self.m_star, "r": self.r_conclusion,
                "grid_zeta": self.grid_zeta, "grid_m": self.grid_m}


def optimize_m(cfg: SieveConfig = SieveConfig(), grid: int = 10**6) -> Optimum:
    tau, beta3 = float(cfg.tau), cfg.beta3
    zs = np.linspace(beta3 / grid, beta3, grid, endpoint=False)
    ms = m_of_zeta(zs, tau, beta3)
    k = int(np.argmin(ms))
    lo, hi = zs[max(k - 1, 0)] / 2, zs[min(k + 1, grid - 1)]
    res = minimize_scalar(lambda z: float(m_of_zeta(z, tau, beta3)), bracket=(lo, zs[k], hi),
                          method="golden", tol=1e-10)
    m_star = float(res.fun)
    return Optimum(float(res.x), m_star, math.floor(m_star) + 1, float(zs[k]), float(ms[k]))


# ----------------------------------------------------------------------
# surveys
# ----------------------------------------------------------------------

@lru_cache(maxsize=8)
def _omega_table(limit: int) -> np.ndarray:
    """Omega(k) for 0 <= k <= limit via a smallest-prime-factor sieve."""
    spf = np.arange(limit + 1)
    for p in primes_upto(int(math.isqrt(limit)) + 1):
        p = int(p)
        view = spf[p * p::p]
        np.copyto(view, p, where=view == np.arange(p * p, limit + 1, p))
    out = np.zeros(limit + 1, dtype=np.int64)
    for k in range(2, limit + 1):
        out[k] = out[k // spf[k]] + 1
    return out


def positive_representations(n: int) -> np.ndarray:
    """All (x1, x2, x3) with 0 <= x1 <= x2 <= x3 and sum of squares n."""
    r = math.isqrt(n)
    x1 = np.arange(0, math.isqrt(n // 3) + 1)
    x2 = np.arange(0, math.isqrt(n // 2) + 1)
    a, b = np.meshgrid(x1, x2, indexing="ij")
    rest = n - a * a - b * b
    ok = (b >= a) & (rest >= b * b)
    a, b, rest = a[ok], b[ok], rest[ok]
    c = np.rint(np.sqrt(rest)).astype(np.int64)
    hit = c * c == rest
    out = np.stack([a[hit], b[hit], c[hit]], axis=1)
    assert out.size == 0 or out.max() <= r
    return out


def min_omega(n: int) -> tuple[int, tuple[int, int, int]]:
    reps = positive_representations(n)
    if len(reps) == 0:
        raise AssertionError(f"{n} has no representation by three squares")
    table = _omega_table(math.isqrt(n) + 1)
    scores = table[reps].sum(axis=1)
    # a zero coordinate makes the product 0, which is never an almost prime
    scores = np.where((reps == 0).any(axis=1), np.iinfo(np.int64).max, scores)
    k = int(np.argmin(scores))
    return int(scores[k]), tuple(int(x) for x in reps[k])


def min_omega_survey(lo: int, hi: int, budget: int = 10**7) -> dict[int, dict]:
    out = {}
    for n in range(lo, hi + 1):
        if not admissible(n):
            continue
        work = (math.isqrt(n // 3) + 1) * (math.isqrt(n // 2) + 1)
        if work > budget:
            out[n] = {"skipped": "BudgetExceeded"}
            continue
        val, x = min_omega(n)
        out[n] = {"min_Omega": val, "x": list(x)}
    return out


# ----------------------------------------------------------------------
# smooth representations
# ----------------------------------------------------------------------

@dataclass
class SmoothResult:
    n: int
    variant: str
    window: tuple[float, float]
    found: bool
    d: tuple | None = None
    e: tuple | None = None
    x: tuple | None = None
    largest_prime: int | None = None
    prime_bound: int | None = None
    reason: str | None = None

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def _kronecker_ok(p: int, n: int) -> bool:
    """(p/n) = 1; for n even the Legendre symbol (n/p) is used, equal by reciprocity since p = 1 mod 4."""
    if n % 2:
        return jacobi(p, n) == 1
    return jacobi(n % p, p) == 1


def _window_primes(n: int, lo: float, hi: float, split: bool) -> list[int]:
    ps = [int(p) for p in primes_upto(int(hi) + 1) if lo <= p <= hi]
    ps = [p for p in ps if p % 4 == 1 and n % p]
    if split:
        ps = [p for p in ps if _kronecker_ok(p, n)]
    return ps


def _solve_diag(n: int, d) -> tuple[int, int, int] | None:
    """A solution of sum d_i^2 x_i^2 = n with every x_i nonzero.

    Loops over the coordinate with the largest coefficient and splits the
    remainder into two squares, so the cost grows like sqrt(n)/max(d).
    """
    order = sorted(range(3), key=lambda i: d[i])
    d1, d2, d3 = (d[i] for i in order)
    g = math.gcd(d1, d2)
    a, b = d1 // g, d2 // g
    for x3 in range(1, math.isqrt(n // (d3 * d3)) + 1):
        rest = n - d3 * d3 * x3 * x3
        if rest <= 0 or rest % (g * g):
            continue
        for u, v in sum_of_squares(rest // (g * g), 2, zeros=True):
            for s, t in ((u, v), (v, u)):
                if s and t and s % a == 0 and t % b == 0:
                    x = [0, 0, 0]
                    x[order[0]], x[order[1]], x[order[2]] = s // a, t // b, x3
                    return tuple(x)
    return None


def smooth_search(n: int, eta: float, widen: float = 2.0, variant: str = "plain",
                  max_tries: int = 10**4) -> SmoothResult:
    if n % 8 in (0, 4, 7):
        raise ValueError("n must not be 0, 4 or 7 mod 8")
    if variant not in ("plain", "split_e"):
        raise ValueError("variant must be plain or split_e")
    split = variant == "split_e"
    # the e_i are multiplied in pairs, so their window sits at n^(eta/2)
    base = n ** (eta / 2 if split else eta)
    lo, hi = base, widen * base
    primes = _window_primes(n, lo, hi, split)
    res = SmoothResult(n, variant, (lo, hi), False)
    if len(primes) < 3:
        res.reason = EmptyWindow.__name__
        return res
    for tries, trip in enumerate(itertools.combinations(primes, 3)):
        if tries >= max_tries:
            res.reason = BudgetExceeded.__name__
            return res
        if split:
            e1, e2, e3 = trip
            d = (e1 * e2, e1 * e3, e2 * e3)
        else:
            d = trip
        x = _solve_diag(n, d)
        if x is None:
            continue
        y = [di * xi for di, xi in zip(d, x)]
        res.found = True
        res.d, res.x = d, x
        res.e = trip if split else None
        res.largest_prime = largest_prime_factor(y[0] * y[1] * y[2])
        res.prime_bound = max(max(trip), math.isqrt(n // min(d) ** 2))
        return res
    res.reason = "NoSolution"
    return res


def verify_smooth(res: SmoothResult) -> bool:
    """Re-check the arithmetic of a reported hit."""
    if not res.found:
        return True
    ok = sum(di * di * xi * xi for di, xi in zip(res.d, res.x)) == res.n
    ok = ok and res.largest_prime <= res.prime_bound
    y = math.prod(di * xi for di, xi in zip(res.d, res.x))
    ok = ok and largest_prime_factor(y) == res.largest_prime
    if res.e is not None:
        ok = ok and all(_kronecker_ok(p, res.n) for p in res.e)
        ok = ok and math.gcd(res.e[0], res.e[1]) == math.gcd(res.e[0], res.e[2]) == math.gcd(res.e[1], res.e[2]) == 1
    return ok


def sieve_report(n: int, cfg: SieveConfig = SieveConfig(), dmax: int = 15,
                 cutoff: int = 10**4) -> SieveReport:
    rep = SieveReport()
    for d in range(1, dmax + 1):
        if not is_squarefree(d):
            continue
        rep.Omega_table[d] = Omega_of_d(d, n)
        for l in triples_with_lcm(d):
            rep.omega_table[l] = omega_weight(l, n)
        if n % 8 == 3:
            rep.identity_checks.append((n, d, *sieve_identity_check(n, d)))
    rep.X = main_term_X(n, cutoff)
    opt = optimize_m(cfg)
    rep.zeta_star, rep.m_star, rep.r_conclusion = opt.zeta_star, opt.m_star, opt.r_conclusion
    return rep
