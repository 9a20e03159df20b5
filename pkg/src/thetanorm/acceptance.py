"""The twelve acceptance criteria, each as a function returning a Result.

Shared by the test suite and by ``thetanorm verify``.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import divisor_sigma

from . import bounds as B
from . import sieve
from .eisenstein import genus_coefficient
from .forms import (QuadForm, diagonal_form, inverse_frac, random_dense_form,
                    random_diagonal_form, scramble, validate_form)
from .lattice import count_representations, theta_coefficients
from .modular import fourier_magnitudes, petersson_norm_estimate, transform_data
from .padic import (density_bruteforce, density_unramified, density_yang,
                    f_invariant, hanke_lower_bound, hanke_modulus_exponent, jordan_decompose, level_from_local,
                    local_primes)


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    measured: str
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} {self.title}: {self.measured} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        out = {"criterion": self.number, "title": self.title, "passed": self.passed,
               "measured": self.measured, "seconds": self.seconds}
        if self.details:
            out["details"] = self.details
        return out


def _timed(fn):
    def wrapper(*args, **kwargs):
        t = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def density_corpus(count: int = 500, seed: int = 1) -> list[tuple[QuadForm, int, int]]:
    rng = random.Random(seed)
    out = [(diagonal_form([1, 1, 1]), 3, 1)]
    while len(out) < count:
        m = rng.choice([3, 4, 5])
        form = random_diagonal_form(rng, m, 27)
        out.append((form, rng.choice([3, 5, 7, 11]), rng.randint(1, 200)))
    return out


def random_forms(count: int, seed: int, dims=(3, 4, 5)) -> list[QuadForm]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = rng.choice(dims)
        if rng.random() < 0.5:
            out.append(random_diagonal_form(rng, m, 12))
        else:
            out.append(random_dense_form(rng, m, 8))
    return out


# ----------------------------------------------------------------------

@_timed
def criterion_1(cases: int = 500) -> Result:
    corpus = density_corpus(cases)
    bad = 0
    for form, p, n in corpus:
        if density_yang(form, p, n).value != density_bruteforce(form, p, n).value:
            bad += 1
    anchor = density_yang(diagonal_form([1, 1, 1]), 3, 1).value
    ok = bad == 0 and anchor == Fraction(2, 3)
    return Result(1, "Yang = bruteforce", ok,
                  f"{len(corpus) - bad}/{len(corpus)} equal, beta_3(2I3,1) = {anchor}")


@_timed
def criterion_2(cases: int = 500) -> Result:
    corpus = density_corpus(cases)
    tested = bad = 0
    for form, p, n in corpus:
        if (2 * n * form.level) % p == 0:
            continue
        tested += 1
        if density_unramified(form, p, n).value != density_bruteforce(form, p, n).value:
            bad += 1
    anchor = density_unramified(diagonal_form([1, 1]), 3, 1).value
    ok = bad == 0 and tested > 0 and anchor == Fraction(4, 3)
    return Result(2, "unramified = bruteforce", ok,
                  f"{tested - bad}/{tested} equal, beta_3(x^2+y^2,1) = {anchor}")


@_timed
def criterion_3() -> Result:
    form = diagonal_form([1, 1, 1, 1])
    worst = 0.0
    for n in range(1, 200, 2):
        exact = 8 * int(divisor_sigma(n))
        val = genus_coefficient(form, n, cutoff=10**5).value
        worst = max(worst, abs(val - exact) / exact)
    return Result(3, "Jacobi four squares", worst <= 0.02, f"max relative error {worst:.2e}")


@_timed
def criterion_4(count: int = 200) -> Result:
    bad = 0
    for form in random_forms(count, 4):
        decomps = [jordan_decompose(form, p) for p in local_primes(form)]
        if level_from_local(decomps, form) != form.level:
            bad += 1
    return Result(4, "level from local data", bad == 0, f"{count - bad}/{count} agree")


@_timed
def criterion_5(count: int = 200) -> Result:
    rng = random.Random(55)
    bad = []
    for k, form in enumerate(random_forms(count, 4)):
        m = form.m
        vals = [f_invariant(form, s).exact_integer for s in range(1, m + 1)]
        if vals[-1] != form.det:
            bad.append((k, "F(Q,m) != det"))
        if 2 * vals[0] < form.level:
            bad.append((k, "F(Q,1) < N/2"))
        if any(a > b for a, b in zip(vals, vals[1:])):
            bad.append((k, "not monotone"))
        other, _ = scramble(form, rng)
        if [f_invariant(other, s).exact_integer for s in range(1, m + 1)] != vals:
            bad.append((k, "not invariant"))
    return Result(5, "F-invariant identities", not bad,
                  f"{count - len({b[0] for b in bad})}/{count} forms satisfy all four")


@_timed
def criterion_6() -> Result:
    t = time.perf_counter()
    opt = sieve.optimize_m(sieve.SieveConfig())
    dt = time.perf_counter() - t
    ok = (abs(opt.m_star - 71.3875) <= 0.01 and abs(opt.zeta_star - 0.0561) <= 0.001
          and opt.r_conclusion == 72 and dt < 1.0)
    return Result(6, "sieve constant", ok,
                  f"m* = {opt.m_star:.5f} at zeta* = {opt.zeta_star:.7f}, r = {opt.r_conclusion}, "
                  f"under 1s: {dt < 1.0}")


@_timed
def criterion_7() -> Result:
    checks = []
    for n in (27, 51, 99, 123, 147):
        for d in range(1, 16):
            if sieve.is_squarefree(d):
                checks.append((n, d, *sieve.sieve_identity_check(n, d)))
    worked = {(n, d): lhs for n, d, lhs, _, _ in checks}
    ok = all(c[4] for c in checks) and worked[(27, 5)] == 24 and worked[(27, 3)] == 8
    passed = sum(1 for c in checks if c[4])
    return Result(7, "inclusion-exclusion identity", ok,
                  f"{passed}/{len(checks)} exact, (27,5) -> {worked[(27, 5)]}, (27,3) -> {worked[(27, 3)]}")


def _random_rho(rng: random.Random, N: int, coprime: bool, cmax: int):
    while True:
        c = rng.randrange(1, cmax)
        if N % c == 0 and c % N == 0:
            continue
        if coprime and math.gcd(c, N) != 1:
            continue
        if c % N == 0:
            continue
        d = rng.randrange(1, 4 * c + 2)
        if math.gcd(c, d) != 1:
            continue
        a = pow(d, -1, c) if c > 1 else 1
        b = (a * d - 1) // c
        return ((a, b), (c, d))


@_timed
def criterion_8(count: int = 100) -> Result:
    rng = random.Random(8)
    structural_bad = 0
    worst = 0.0
    coprime_cases = 0
    done = 0
    while done < count:
        m = rng.choice([3, 4])
        form = random_diagonal_form(rng, m, 8) if rng.random() < 0.5 else random_dense_form(rng, m, 6)
        N = form.level
        if N > 50:
            continue
        coprime = done % 2 == 0
        cmax = 40 if m == 3 else 25
        rho = _random_rho(rng, N, coprime, cmax)
        td = transform_data(form, rho)
        S = td.S.gram
        ok = (all(S[i][i] % 2 == 0 for i in range(m)) and td.S.det > 0
              and td.S.level <= N)
        structural_bad += not ok
        if math.gcd(rho[1][0], N) == 1:
            coprime_cases += 1
            mags = fourier_magnitudes(form, rho, 10)
            dual = validate_form([[int(N * x) for x in row] for row in inverse_frac(form.gram)])
            ref = [count_representations(dual, td.d_hat * n) / math.sqrt(form.det) for n in range(11)]
            worst = max(worst, max(abs(a - b) for a, b in zip(mags, ref)))
        done += 1
    ok = structural_bad == 0 and worst <= 1e-6
    return Result(8, "transformation lemmas", ok,
                  f"S checks {count - structural_bad}/{count}; coprime cases {coprime_cases}, "
                  f"max |a(n)| error {worst:.1e}")


@_timed
def criterion_9() -> Result:
    rng = random.Random(9)
    notes = []
    ok = True
    # g-mode on a scrambled copy
    g_worst = 0.0
    for coeffs in ([1, 1, 1], [1, 1, 2], [1, 2, 3]):
        form = diagonal_form(coeffs)
        other, _ = scramble(form, rng)
        est = petersson_norm_estimate(form, other, mode="g", grid=(12, 12))
        g_worst = max(g_worst, abs(est.value))
    ok &= g_worst <= 1e-8
    notes.append(f"g-mode max {g_worst:.1e}")
    # refinement on small levels
    d_worst = 0.0
    for coeffs in ([1, 1, 1], [1, 1, 2], [1, 2, 2], [1, 1, 3]):
        est = petersson_norm_estimate(diagonal_form(coeffs), mode="f", grid=(16, 16))
        d_worst = max(d_worst, est.refinement_delta)
    ok &= d_worst <= 0.02
    notes.append(f"max refinement_delta {d_worst:.1e}")
    # bracketing against the two bounds
    brackets = []
    for Np in (4, 8, 12):
        form = diagonal_form([1, 1, Np])
        est = petersson_norm_estimate(form, mode="f", grid=(16, 16), floor=1e-4)
        lower = B.thm3_lower(form).value
        upper = B.thm2_bound(form).value
        inside = 0.01 * lower <= est.value <= 100 * upper
        ok &= inside
        brackets.append({"N_prime": Np, "value": est.value, "lower": 0.01 * lower,
                         "upper": 100 * upper, "inside": inside})
        notes.append(f"N'={Np}: <f,f>={est.value:.2e} vs [{0.01 * lower:.2e}, {100 * upper:.2e}]"
                     f"{'' if inside else ' OUT'}")
    return Result(9, "norm estimator", bool(ok), "; ".join(notes),
                  details={"g_mode_max": g_worst, "refinement_delta_max": d_worst,
                           "brackets": brackets})


@_timed
def criterion_10(count: int = 200) -> Result:
    form = diagonal_form([1, 1, 1, 1])
    r = theta_coefficients(form, 10**4).r
    missing = sum(1 for v in r if v < 1)
    thr = B.threshold_m45(form, 1, 1).value
    rng = random.Random(10)
    tested = bad = 0
    while tested < count:
        m = rng.choice([4, 5])
        f = random_diagonal_form(rng, m, 12) if rng.random() < 0.5 else random_dense_form(rng, m, 8)
        p = rng.choice(local_primes(f))
        n = rng.randint(1, 60)
        if p ** hanke_modulus_exponent(f, p, n) > 3 * 10**5:
            continue
        # the lower bound assumes a primitive local solution
        hb = hanke_lower_bound(f, p, n)
        if hb.solution_type == "none":
            continue
        beta = density_bruteforce(f, p, n).value
        tested += 1
        if hb.bound > beta:
            bad += 1
    ok = missing == 0 and thr == 576 and bad == 0
    return Result(10, "threshold consistency", ok,
                  f"r(2I4,n) >= 1 for all n <= 10^4: {missing == 0}; threshold {thr:g}; "
                  f"Hanke <= bruteforce on {tested - bad}/{tested}")


@_timed
def criterion_11(hi: int = 50000) -> Result:
    survey = sieve.min_omega_survey(3, hi)
    worst = max(v["min_Omega"] for v in survey.values())
    skipped = sum(1 for v in survey.values() if "skipped" in v)
    ok = worst <= 10 and skipped == 0
    return Result(11, "almost-prime survey", ok,
                  f"{len(survey)} admissible n, max min-Omega {worst}, skipped {skipped}")


SMOOTH_CASES = [(n, 0.12, 8, "plain") for n in range(10**6 + 1, 10**6 + 200, 2) if n % 8 not in (0, 4, 7)] + [
    (10**13 + 19, 0.05, 14, "split_e"), (10**13 + 1, 0.05, 14, "split_e"),
    (10**6 + 3, 0.05, 24, "split_e")]


@_timed
def criterion_12() -> Result:
    hits = {"plain": 0, "split_e": 0}
    bad = 0
    for n, eta, widen, variant in SMOOTH_CASES:
        res = sieve.smooth_search(n, eta, widen, variant)
        if res.found:
            hits[variant] += 1
        if not sieve.verify_smooth(res):
            bad += 1
    ok = bad == 0 and hits["plain"] > 0 and hits["split_e"] > 0
    return Result(12, "smooth search", ok,
                  f"{len(SMOOTH_CASES) - bad}/{len(SMOOTH_CASES)} verified, hits {hits}")


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
            11: criterion_11, 12: criterion_12}

SUITES = {"local": (1, 2, 4, 5), "counting": (3, 10), "transform": (8, 9),
          "sieve": (6, 7, 11, 12), "all": tuple(range(1, 13))}


def run_suite(name: str) -> list[Result]:
    return [CRITERIA[k]() for k in SUITES[name]]
