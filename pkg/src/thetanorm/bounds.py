"""Explicit evaluators for the norm, coefficient and threshold bounds.

Every bound is reported with its implied constant and epsilon made
explicit (defaults c = 1, epsilon = 0) and with a per-term trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from .errors import DimensionTooSmall, NotDiagonal
from .forms import QuadForm, dual_form, gram_schmidt, minimum
from .padic import f_invariant, jordan_decompose, local_primes, residue_count

KINDS = ("thm1", "thm2_diagonal", "thm3_lower", "eq13_petersson", "eq21_dukeiwaniec",
         "lemma41_error", "lemma42_threshold")


@dataclass(frozen=True)
class BoundConfig:
    epsilon: float = 0.0
    constant: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and math.isfinite(self.constant)):
            raise ValueError("epsilon and constant must be finite")
        if self.epsilon < 0 or self.constant <= 0:
            raise ValueError("need epsilon >= 0 and constant > 0")


@dataclass
class BoundReport:
    kind: str
    inputs: dict
    value: float
    trace: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "inputs": self.inputs, "value": self.value,
                "trace": self.trace, **self.extra}


# ----------------------------------------------------------------------
# norm bounds
# ----------------------------------------------------------------------

def _F(form: QuadForm, s) -> float:
    return f_invariant(form, s).value


def thm1_bound(form: QuadForm, cfg: BoundConfig = BoundConfig()) -> BoundReport:
    m, N, det = form.m, form.level, form.det
    c, eps = cfg.constant, cfg.epsilon
    if m < 3:
        raise DimensionTooSmall("needs m >= 3")
    if m == 3:
        trace = {"N/det^(1/3)": c * N ** (1 + eps) / det ** (1 / 3)}
    elif m == 4:
        trace = {"N^2/F(Q,2)": c * N ** (2 + eps) / _F(form, 2),
                 "N/det^(1/4)": c * N ** (1 + eps) / det ** 0.25}
    else:
        s = Fraction(m - 1, 2) - Fraction(1, m)
        trace = {f"N^(m/2)/F(Q,{s})": c * N ** (m / 2 + eps) / _F(form, s)}
    return BoundReport("thm1", {"m": m, "N": N, "det": det, **cfg.__dict__},
                       sum(trace.values()), trace)


def thm2_bound(form: QuadForm, cfg: BoundConfig = BoundConfig()) -> BoundReport:
    if not form.is_diagonal():
        raise NotDiagonal("the diagonal bound needs a diagonal Gram matrix")
    m, N = form.m, form.level
    a = sorted(form.diag_q())
    c, eps = cfg.constant, cfg.epsilon
    trace = {"N^(m/2)/F(Q,m/2)": c * N ** (m / 2 + eps) / _F(form, Fraction(m, 2)),
             "N/sqrt(a_m a_(m-1))": c * N ** (1 + eps) / math.sqrt(a[-1] * a[-2])}
    return BoundReport("thm2_diagonal", {"m": m, "N": N, "a": a, **cfg.__dict__},
                       sum(trace.values()), trace)


def thm3_lower(form: QuadForm, cfg: BoundConfig = BoundConfig()) -> BoundReport:
    m, N, det = form.m, form.level, form.det
    M = minimum(dual_form(form))
    main = N ** (m / 2) / det
    value = cfg.constant * main * M ** (1 - m / 2)
    return BoundReport("thm3_lower", {"m": m, "N": N, "det": det, "M": M, **cfg.__dict__},
                       value, {"N^(m/2)/det * M^(1-m/2)": value})


def norm_bounds(form: QuadForm, cfg: BoundConfig = BoundConfig()) -> list[BoundReport]:
    out = [thm1_bound(form, cfg)]
    if form.is_diagonal():
        out.append(thm2_bound(form, cfg))
    out.append(thm3_lower(form, cfg))
    return out


# ----------------------------------------------------------------------
# coefficient bounds
# ----------------------------------------------------------------------

def eq13_bound(norm: float, m: int, n: int, N: int, cfg: BoundConfig = BoundConfig()) -> BoundReport:
    if n < 1:
        raise ValueError("n must be positive")
    g = math.gcd(n, N)
    base = cfg.constant * norm * n ** (m / 4 - 0.5) * (n * N) ** cfg.epsilon
    trace = {"main": base, "secondary": base * n ** 0.25 * g ** 0.25 / math.sqrt(N)}
    return BoundReport("eq13_petersson", {"norm": norm, "m": m, "n": n, "N": N, **cfg.__dict__},
                       sum(trace.values()), trace)


def dukeiwaniec_profile(n: int, N: int) -> dict:
    """n = t v^2 w^2 with t squarefree, v supported on primes of N and (w, N) = 1."""
    t = v = w = 1
    for p, e in factorint(n).items():
        t *= p ** (e % 2)
        if N % p == 0:
            v *= p ** (e // 2)
        else:
            w *= p ** (e // 2)
    return {"t": t, "v": v, "w": w}


def eq21_bound(norm: float, n: int, N: int, v: int | None = None,
               cfg: BoundConfig = BoundConfig()) -> BoundReport:
    if n < 1:
        raise ValueError("n must be positive")
    if v is None:
        v = dukeiwaniec_profile(n, N)["v"]
    g = math.gcd(n, N)
    base = cfg.constant * norm * n ** 0.25 * (n * N) ** cfg.epsilon
    trace = {"1": base, "n^(3/14)/N^(1/7)": base * n ** (3 / 14) / N ** (1 / 7),
             "n^(3/16)/N^(1/16)": base * n ** (3 / 16) / N ** (1 / 16),
             "sqrt(v (n,N))/sqrt(N)": base * math.sqrt(v * g) / math.sqrt(N)}
    return BoundReport("eq21_dukeiwaniec", {"norm": norm, "n": n, "N": N, "v": v, **cfg.__dict__},
                       sum(trace.values()), trace)


def coeff_bounds(norm: float, m: int, n: int, N: int, profile: dict | None = None,
                 cfg: BoundConfig = BoundConfig()) -> list[BoundReport]:
    out = [eq13_bound(norm, m, n, N, cfg)]
    if m == 3:
        v = (profile or {}).get("v")
        out.append(eq21_bound(norm, n, N, v, cfg))
    return out


# ----------------------------------------------------------------------
# anisotropy
# ----------------------------------------------------------------------

def _squarefree_int(x: Fraction) -> int:
    """An integer in the same square class as the nonzero rational x."""
    return x.numerator * x.denominator


def hilbert_symbol(a: int, b: int, p: int) -> int:
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of 0")
    alpha, beta = 0, 0
    while a % p == 0:
        a //= p
        alpha += 1
    while b % p == 0:
        b //= p
        beta += 1
    if p != 2:
        from .arith import jacobi
        sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
        return sign * jacobi(a, p) ** beta * jacobi(b, p) ** alpha

    def eps(u):
        return ((u - 1) // 2) % 2

    def omega(u):
        return ((u * u - 1) // 8) % 2

    exp = eps(a) * eps(b) + alpha * omega(b) + beta * omega(a)
    return -1 if exp % 2 else 1


def is_anisotropic_hilbert(form: QuadForm, p: int) -> bool:
    if form.m != 3:
        raise ValueError("ternary forms only")
    _, a = gram_schmidt(form.gram)
    a1, a2, a3 = (_squarefree_int(Fraction(x) / 2) for x in a)
    return hilbert_symbol(-a1 * a2, -a1 * a3, p) == -1


def is_anisotropic_search(form: QuadForm, p: int) -> bool:
    """No primitive zero of q modulo p^k, with k = 2 s + 1 (2 s + 3 at p = 2).

    s is the largest Jordan scale.  A primitive zero has a unit coordinate
    whose partial derivative has valuation at most s (s + 1 at p = 2), so
    Hensel's lemma lifts any primitive zero modulo p^k to a p-adic zero.
    """
    smax = max(b.scale for b in jordan_decompose(form, p).blocks)
    k = 2 * smax + (3 if p == 2 else 1)
    k = max(k, 2)
    prim = residue_count(form, p, 0, k) - p ** form.m * residue_count(form, p, 0, k - 2)
    return prim == 0


def anisotropic_primes(form: QuadForm, check: bool = True) -> set[int]:
    out = set()
    for p in local_primes(form):
        h = is_anisotropic_hilbert(form, p)
        if check and h != is_anisotropic_search(form, p):
            raise AssertionError(f"anisotropy oracles disagree at {p}")
        if h:
            out.add(p)
    return out


# ----------------------------------------------------------------------
# error term and thresholds
# ----------------------------------------------------------------------

def n_tilde(n: int, N: int) -> int:
    """Largest divisor of n whose N-part is squarefree."""
    out = 1
    for p, e in factorint(n).items():
        out *= p ** (min(e, 1) if N % p == 0 else e)
    return out


def error_bound_m3(form: QuadForm, n: int, cfg: BoundConfig = BoundConfig()) -> BoundReport:
    if form.m != 3:
        raise DimensionTooSmall("the ternary error bound needs m = 3")
    N, det = form.level, form.det
    nt = n_tilde(n, N)
    nt_part = math.prod(p for p in factorint(nt) if N % p == 0)
    aniso = sorted(anisotropic_primes(form))
    v = math.prod(p ** _vp(N, p) for p in aniso)
    g = math.gcd(n, N)
    pre = cfg.constant * math.sqrt(N) / det ** (1 / 6) * (n * N) ** cfg.epsilon
    trace = {"n^(13/28)/N^(1/7)": pre * n ** (13 / 28) / N ** (1 / 7),
             "n^(7/16)/N^(1/16)": pre * n ** (7 / 16) / N ** (1 / 16),
             "n^(1/4) sqrt((n~,N^inf)) v^(1/4) sqrt((n,N))/sqrt(N)":
                 pre * n ** 0.25 * math.sqrt(nt_part) * v ** 0.25 * math.sqrt(g) / math.sqrt(N)}
    return BoundReport("lemma41_error", {"n": n, "N": N, "det": det, **cfg.__dict__},
                       sum(trace.values()), trace,
                       {"n_tilde": nt, "v": v, "anisotropic_primes": aniso})


def _vp(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def beta_upper(form: QuadForm, n: int) -> float:
    """The admissible beta for n primitively (m = 4) or locally (m >= 5) represented."""
    m, N = form.m, form.level
    g = math.gcd(n, N)
    if m == 4:
        return math.sqrt(g)
    if m < 4:
        raise DimensionTooSmall("needs m >= 4")
    # (n, det^(1/(m-4))) read as gcd(n^(m-4), det)^(1/(m-4))
    return min(g, math.gcd(n ** (m - 4), form.det) ** (1 / (m - 4)))


def threshold_m45(form: QuadForm, beta: float = 1.0, gcd_nN: int = 1,
                  cfg: BoundConfig = BoundConfig(), n: int | None = None) -> BoundReport:
    m, N, det = form.m, form.level, form.det
    c, eps = cfg.constant, cfg.epsilon
    extra = {}
    if n is not None:
        extra["beta_upper"] = beta_upper(form, n)
    if m < 4:
        raise DimensionTooSmall("no threshold for m = 3")
    inputs = {"m": m, "N": N, "det": det, "beta": beta, "gcd_nN": gcd_nN, **cfg.__dict__}
    if m == 4:
        inner = N * det / _F(form, 2) + det ** 0.75
        first = c * beta ** 4 * gcd_nN * inner ** 2 * N ** eps
        second = c * beta ** 2 * N ** 2 * inner * N ** eps
        trace = {"N det/F(Q,2)": N * det / _F(form, 2), "det^(3/4)": det ** 0.75,
                 "first": first, "second": second}
        return BoundReport("lemma42_threshold", inputs, first, trace,
                           {"thresholds": [first, second], **extra})
    s = Fraction(m - 1, 2) - Fraction(1, m)
    t1 = N ** (m / 2 - 1) * det / _F(form, s)
    t2 = det ** (1 - 2 / m)
    value = c * (beta ** 2 * math.sqrt(gcd_nN) * (t1 + t2)) ** (2 / (m - 3)) * N ** eps
    trace = {f"N^(m/2-1) det/F(Q,{s})": t1, "det^(1-2/m)": t2, "exponent": 2 / (m - 3)}
    return BoundReport("lemma42_threshold", inputs, value, trace, {"thresholds": [value], **extra})
