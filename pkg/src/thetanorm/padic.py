"""Local data of a quadratic form: Jordan splittings and representation densities.

Densities follow the normalisation

    beta_p(n, Q) = lim_a p^{-a(m-1)} #{x mod p^a : q(x) = n mod p^a}.

Three independent routes are provided: exact residue counting
(``bruteforce``), Yang's formula for odd p (``yang_odd``) and Siegel's
closed form at primes not dividing 2nN (``siegel_unramified``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .arith import isprime, jacobi, legendre_array, prime_divisors, primes_upto, valuation
from .errors import (
    DimensionTooSmall,
    MethodInvalid,
    MissingPrime,
    PivotFailure,
    PrecisionTooLow,
    StabilizationOverflow,
)
from .forms import QuadForm

# ----------------------------------------------------------------------
# Jordan decomposition
# ----------------------------------------------------------------------

_KIND_ORDER = {"Y": 0, "H": 1, "U": 2}


@dataclass(frozen=True)
class Block:
    """One Jordan constituent of q over Z_p.

    ``scale`` is the exponent of p in front of the block of q: p^scale * u * x^2
    for unary blocks and 2^scale * g(x, y) for binary blocks (g = xy or
    x^2 + xy + y^2 up to Z_2-equivalence).  ``gram`` holds the exact Gram
    sub-matrix actually produced, which is what the counting code uses.
    """

    scale: int
    kind: str                       # "U", "H" or "Y"
    unit: int | None                # residue of the unit mod p^precision (unary only)
    gram: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return 1 if self.kind == "U" else 2


@dataclass(frozen=True)
class JordanDecomposition:
    p: int
    blocks: tuple[Block, ...]
    precision: int
    witness: tuple[tuple[int, ...], ...]          # columns = new basis, mod p^precision
    transform: tuple[tuple[Fraction, ...], ...] = field(repr=False, compare=False)

    @property
    def m(self) -> int:
        return sum(b.dim for b in self.blocks)

    @property
    def r1(self) -> int:
        return sum(1 for b in self.blocks if b.kind == "Y")

    @property
    def r2(self) -> int:
        return sum(1 for b in self.blocks if b.kind != "U")

    @property
    def nu(self) -> list[int]:
        """Per-coordinate scales, binary scales listed twice."""
        out = []
        for b in self.blocks:
            out.extend([b.scale] * b.dim)
        return out

    @property
    def units(self) -> list[int | None]:
        out = []
        for b in self.blocks:
            out.extend([b.unit] * b.dim)
        return out

    def to_json(self) -> dict:
        return {"p": self.p, "precision": self.precision,
                "blocks": [{"scale": b.scale, "kind": b.kind, "unit": b.unit,
                            "gram": [[str(x) for x in row] for row in b.gram]} for b in self.blocks],
                "witness": [list(c) for c in self.witness], "r1": self.r1, "r2": self.r2}

    def local_level_exponent(self) -> int:
        if self.p != 2:
            return max(self.nu)
        return max(b.scale + (2 if b.kind == "U" else 0) for b in self.blocks)


def _fval(x: Fraction, p: int) -> float:
    return math.inf if x == 0 else valuation(x, p)


def _bil(gram, x, y) -> Fraction:
    m = len(gram)
    return sum(x[i] * gram[i][j] * y[j] for i in range(m) for j in range(m) if x[i] and y[j])


def _mod_frac(x: Fraction, mod: int) -> int:
    return x.numerator * pow(x.denominator, -1, mod) % mod


def min_precision(form: QuadForm, p: int) -> int:
    return valuation(2 * form.det, p) + 3


def jordan_decompose(form: QuadForm, p: int, precision: int | None = None) -> JordanDecomposition:
    """Z_p-equivalence of q to a direct sum of scaled unary and (p = 2) binary blocks.

    Exact rational Gram-Schmidt with p-integral pivots.  At p = 2 a
    Jordan constituent containing a unary block is fully diagonalised, so
    the number of binary blocks is an invariant of the form.
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    need = min_precision(form, p)
    if precision is None:
        precision = need
    if precision < need:
        raise PrecisionTooLow(f"precision {precision} < {need}")
    return _jordan_cached(form.gram, p, precision)


@lru_cache(maxsize=4096)
def _jordan_cached(gram_t, p: int, precision: int) -> JordanDecomposition:
    gram = [[Fraction(x) for x in row] for row in gram_t]
    m = len(gram)
    rem = [[Fraction(int(i == j)) for i in range(m)] for j in range(m)]
    done: list[tuple[list[list[Fraction]], str, int]] = []   # (vectors, kind, gram valuation)
    guard = 0
    while rem:
        guard += 1
        if guard > 50 * m * m:
            raise PivotFailure("Jordan splitting did not terminate")
        k = len(rem)
        g = [[_bil(gram, rem[i], rem[j]) for j in range(k)] for i in range(k)]
        vals = [[_fval(g[i][j], p) for j in range(k)] for i in range(k)]
        v = min(min(row) for row in vals)
        diag = [i for i in range(k) if vals[i][i] == v]
        if diag:
            i = diag[0]
            w = rem.pop(i)
            bw = g[i][i]
            rem = [[x - (_bil(gram, vec, w) / bw) * y for x, y in zip(vec, w)] for vec in rem]
            done.append(([w], "U", v))
            continue
        i, j = next((i, j) for i in range(k) for j in range(i + 1, k) if vals[i][j] == v)
        if p != 2:
            rem[i] = [x + y for x, y in zip(rem[i], rem[j])]
            continue
        odd_partner = next((idx for idx, (_, kind, gv) in enumerate(done)
                            if kind == "U" and gv == v), None)
        if odd_partner is not None:
            w = done.pop(odd_partner)[0][0]
            rem[i] = [x + y for x, y in zip(rem[i], w)]
            rem.append(w)
            continue
        e, f = rem[i], rem[j]
        a11, a12, a22 = g[i][i], g[i][j], g[j][j]
        det = a11 * a22 - a12 * a12
        rest = [vec for idx, vec in enumerate(rem) if idx not in (i, j)]
        new_rest = []
        for vec in rest:
            be, bf = _bil(gram, vec, e), _bil(gram, vec, f)
            alpha = (a22 * be - a12 * bf) / det
            beta = (a11 * bf - a12 * be) / det
            new_rest.append([x - alpha * y - beta * z for x, y, z in zip(vec, e, f)])
        rem = new_rest
        unit_det = det / Fraction(4) ** v
        kind = "Y" if _mod_frac(unit_det, 8) == 3 else "H"
        done.append(([e, f], kind, v))

    mod = p ** precision
    blocks = []
    cols = []
    for vecs, kind, v in done:
        sub = tuple(tuple(_bil(gram, x, y) for y in vecs) for x in vecs)
        if kind == "U":
            c = sub[0][0] / 2
            scale = valuation(c, p)
            unit = _mod_frac(c / Fraction(p) ** scale, mod)
            blocks.append((Block(scale, "U", unit, sub), vecs))
        else:
            blocks.append((Block(v, kind, None, sub), vecs))
    if p == 2:
        blocks.sort(key=lambda bv: (_KIND_ORDER[bv[0].kind], bv[0].scale))
    else:
        blocks.sort(key=lambda bv: bv[0].scale)
    for _, vecs in blocks:
        cols.extend(vecs)
    transform = tuple(tuple(cols[j][i] for j in range(m)) for i in range(m))
    witness = tuple(tuple(_mod_frac(x, mod) for x in row) for row in transform)
    return JordanDecomposition(p, tuple(b for b, _ in blocks), precision, witness, transform)


# ----------------------------------------------------------------------
# local level, F(Q, s)
# ----------------------------------------------------------------------

def local_primes(form: QuadForm) -> list[int]:
    return sorted(set(prime_divisors(2 * form.det)))


def level_from_local(decomps: Sequence[JordanDecomposition], form: QuadForm | None = None) -> int:
    by_p = {d.p: d for d in decomps}
    if form is not None:
        missing = [p for p in local_primes(form) if p not in by_p]
        if missing:
            raise MissingPrime(f"no decomposition at {missing}")
    elif 2 not in by_p:
        raise MissingPrime("no decomposition at 2")
    n = 1
    for p, d in by_p.items():
        n *= p ** d.local_level_exponent()
    return n


@dataclass(frozen=True)
class FInvariant:
    s: Fraction
    factors: dict[int, Fraction]          # prime -> exponent
    value: float
    exact_integer: int | None


def f_invariant(form: QuadForm, s) -> FInvariant:
    """F(Q, s) = 2^min(m - 2 r2, s) * prod_{p | N} p^{mu_p(s)}."""
    s = Fraction(s)
    m = form.m
    if not 1 <= s <= m:
        raise ValueError("s must lie in [1, m]")
    n = form.level
    factors: dict[int, Fraction] = {}
    d2 = jordan_decompose(form, 2)
    factors[2] = Fraction(min(m - 2 * d2.r2, s))
    for p in prime_divisors(n):
        nu = jordan_decompose(form, p).nu
        mu = Fraction(0)
        for j in range(1, valuation(n, p) + 1):
            vj = sum(1 for x in nu if x >= j)
            mu += min(Fraction(vj), s)
        factors[p] = factors.get(p, Fraction(0)) + mu
    factors = {p: e for p, e in factors.items() if e != 0}
    value = math.prod(float(p) ** float(e) for p, e in factors.items())
    exact = None
    if all(e.denominator == 1 for e in factors.values()):
        exact = math.prod(p ** int(e) for p, e in factors.items())
        value = float(exact)
    return FInvariant(s, factors, value, exact)


# ----------------------------------------------------------------------
# residue counting with square-class functions
# ----------------------------------------------------------------------

class _Orbits:
    """Orbits of Z/p^a under multiplication by squares of units."""

    def __init__(self, p: int, a: int):
        self.p, self.a = p, a
        self.M = M = p ** a
        y = np.arange(M, dtype=np.int64)
        labels = np.zeros(M, dtype=np.int64)
        keys: dict[tuple, int] = {("zero",): 0}
        if p != 2:
            qr = np.zeros(p, dtype=np.int64)
            qr[(np.arange(1, p) ** 2) % p] = 1
        for v in range(a):
            pv = p ** v
            mask = (y % pv == 0) & (y % (pv * p) != 0)
            u = y[mask] // pv
            if p == 2:
                cls = u % (2 ** min(3, a - v))
            else:
                cls = qr[u % p]
            lab = np.empty(len(u), dtype=np.int64)
            for c in np.unique(cls):
                key = (v, int(c))
                keys.setdefault(key, len(keys))
                lab[cls == c] = keys[key]
            labels[mask] = lab
        self.labels = labels
        self.L = len(keys)
        self.sizes = np.bincount(labels, minlength=self.L)
        self.reps = [int(np.flatnonzero(labels == k)[0]) for k in range(self.L)]
        self._struct = None

    @property
    def struct(self) -> np.ndarray:
        """struct[t, O, O'] = #{y in O : rep(t) - y in O'}."""
        if self._struct is None:
            L, M = self.L, self.M
            y = np.arange(M, dtype=np.int64)
            out = np.zeros((L, L, L), dtype=np.int64)
            for t, rep in enumerate(self.reps):
                pair = self.labels * L + self.labels[(rep - y) % M]
                out[t] = np.bincount(pair, minlength=L * L).reshape(L, L)
            self._struct = out
        return self._struct

    def class_function(self, counts: np.ndarray) -> list[int]:
        vals = [int(counts[r]) for r in self.reps]
        # invariance under unit squares is what makes this representation exact
        check = np.array(vals, dtype=np.int64)[self.labels]
        assert np.array_equal(check, counts), "distribution is not a class function"
        return vals


@lru_cache(maxsize=64)
def _orbits(p: int, a: int) -> _Orbits:
    return _Orbits(p, a)


def _block_coeffs(block: Block, M: int) -> tuple[int, ...]:
    g = block.gram
    if block.kind == "U":
        return (_mod_frac(g[0][0] / 2, M),)
    return (_mod_frac(g[0][0] / 2, M), _mod_frac(g[0][1], M), _mod_frac(g[1][1] / 2, M))


def _binary_counts_2adic(b: int, coeffs: tuple[int, ...]) -> np.ndarray | None:
    """#{x mod 2^b : c1 x1^2 + c2 x1 x2 + c3 x2^2 = y} for every y mod 2^b, in closed form.

    A 2-adic binary Jordan block is 2^s xy (c1 c3 / 4^s even) or
    2^s (x^2 + xy + y^2) (c1 c3 / 4^s odd), with 2^s the exact power in c2.
    Returns None when the coefficients do not have that shape.
    """
    M = 1 << b
    c1, c2, c3 = (c % M for c in coeffs)
    y = np.arange(M, dtype=np.int64)
    if c2 == 0:
        if c1 or c3:
            return None
        out = np.zeros(M, dtype=np.int64)
        out[0] = M * M
        return out
    s = valuation(c2, 2)
    if (c1 and valuation(c1, 2) < s) or (c3 and valuation(c3, 2) < s):
        return None
    r = b - s
    # value 2^s w with w mod 2^r; each w class has 2^s lifts, each coordinate 2^s more
    w = (y >> s) % (1 << r)
    vw = np.full(M, r, dtype=np.int64)
    nz = w != 0
    vw[nz] = _vals2(w[nz])
    if ((c1 >> s) * (c3 >> s)) % 2 == 0:
        # xy = w mod 2^r
        base = (np.minimum(vw, r - 1) + 1) << (r - 1)
        base = np.where(w == 0, base + (1 << r), base)
    else:
        # norm form of the unramified quadratic extension
        base = np.where(vw % 2 == 0, 3 << (r - 1), 0)
        base = np.where(w == 0, 1 << (2 * (r - (r + 1) // 2)), base)
    out = np.where(y % (1 << s) == 0, base << (2 * s), 0)
    return out.astype(np.int64)


def _vals2(arr: np.ndarray) -> np.ndarray:
    out = np.zeros(len(arr), dtype=np.int64)
    arr = arr.copy()
    while True:
        even = (arr % 2 == 0) & (arr != 0)
        if not even.any():
            return out
        out[even] += 1
        arr[even] //= 2


@lru_cache(maxsize=4096)
def _block_distribution(p: int, a: int, coeffs: tuple[int, ...], restrict: str | None) -> tuple[int, ...]:
    """Class function of y -> #{x mod p^a : block(x) = y}, optionally with x = 0 mod p."""
    orb = _orbits(p, a)
    M = orb.M
    if p == 2 and len(coeffs) == 3 and a >= 8:
        if restrict == "zero":
            # x = 2x' gives 4 B(x'), which depends on x' mod 2^(a-2) with 4 lifts
            inner = _binary_counts_2adic(a - 2, coeffs)
            if inner is not None:
                counts = np.zeros(M, dtype=np.int64)
                counts[::4] = 4 * inner
                return tuple(orb.class_function(counts))
        else:
            counts = _binary_counts_2adic(a, coeffs)
            if counts is not None:
                return tuple(orb.class_function(counts))
    step = p if restrict == "zero" else 1
    x = np.arange(0, M, step, dtype=np.int64)
    if len(coeffs) == 1:
        vals = (coeffs[0] * ((x * x) % M)) % M
        counts = np.bincount(vals, minlength=M)
    else:
        c1, c2, c3 = coeffs
        counts = np.zeros(M, dtype=np.int64)
        base = (c3 * ((x * x) % M)) % M
        for x1 in range(0, M, step):
            vals = (c1 * x1 * x1 + c2 * x1 * x + base) % M
            counts += np.bincount(vals, minlength=M)
    return tuple(orb.class_function(counts))


def _convolve(orb: _Orbits, f: Sequence[int], g: Sequence[int]) -> list[int]:
    L = orb.L
    st = orb.struct
    out = []
    for t in range(L):
        s = 0
        mat = st[t]
        for i in range(L):
            fi = f[i]
            if fi == 0:
                continue
            row = mat[i]
            s += fi * sum(int(row[j]) * g[j] for j in range(L) if row[j] and g[j])
        out.append(s)
    return out


def _count_blocks(blocks: Sequence[Block], n: int, p: int, a: int,
                  restrict: Sequence[str | None] | None = None) -> int:
    """#{x mod p^a : sum of block values = n mod p^a}."""
    orb = _orbits(p, a)
    M = orb.M
    if restrict is None:
        restrict = [None] * len(blocks)
    key = tuple((_block_coeffs(b, M), r) for b, r in zip(blocks, restrict))
    return _count_table(p, a, key)[int(orb.labels[n % M])]


@lru_cache(maxsize=2048)
def _count_table(p: int, a: int, key) -> tuple[int, ...]:
    orb = _orbits(p, a)
    h = None
    for coeffs, res in key:
        f = _block_distribution(p, a, coeffs, res)
        h = list(f) if h is None else _convolve(orb, h, f)
    return tuple(h)


def residue_count(form: QuadForm, p: int, n: int, a: int) -> int:
    """#{x mod p^a : q(x) = n mod p^a} through the Jordan blocks."""
    jd = jordan_decompose(form, p, max(min_precision(form, p), a + 1))
    return _count_blocks(jd.blocks, n, p, a)


def naive_residue_count(form: QuadForm, p: int, n: int, a: int) -> int:
    """Oracle: scan all of (Z/p^a)^m directly on the original Gram matrix."""
    M = p ** a
    m = form.m
    r = np.arange(M, dtype=np.int64)
    grids = np.meshgrid(*([r] * m), indexing="ij")
    pts = np.stack([g.ravel() for g in grids])
    gram = np.array(form.gram, dtype=np.int64)
    vals = np.einsum("ik,ij,jk->k", pts, gram, pts) // 2
    return int(np.count_nonzero((vals - n) % M == 0))


# ----------------------------------------------------------------------
# densities
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LocalDensity:
    value: Fraction
    p: int
    n: int
    method: str
    stabilization: tuple[int, int] | None = None
    surd_part: Fraction | None = None

    def to_json(self) -> dict:
        out = {"p": self.p, "n": self.n, "method": self.method, "beta": str(self.value)}
        if self.stabilization:
            out["stabilization"] = {"a": self.stabilization[0], "agreements": self.stabilization[1]}
        return out


def stabilization_start(jd: JordanDecomposition, n: int) -> int:
    p = jd.p
    vn = valuation(n, p) if n else 0
    return vn + max(b.scale for b in jd.blocks) + (2 if p != 2 else 4)


def density_bruteforce(form: QuadForm, p: int, n: int) -> LocalDensity:
    m = form.m
    jd0 = jordan_decompose(form, p)
    a0 = stabilization_start(jd0, n)
    cap = a0 + 6
    jd = jordan_decompose(form, p, max(jd0.precision, cap + 1))
    prev = None
    agreements = 1
    a = a0
    while a <= cap:
        beta = Fraction(_count_blocks(jd.blocks, n, p, a), p ** (a * (m - 1)))
        if prev is not None and beta == prev:
            agreements += 1
            if agreements >= 2:
                return LocalDensity(beta, p, n, "bruteforce", (a, agreements))
        else:
            agreements = 1
        prev = beta
        a += 1
    raise StabilizationOverflow(f"beta_{p}({n}) not stable up to a = {cap}")


class _Surd:
    """x + y sqrt(p) with rational x, y."""

    __slots__ = ("x", "y", "p")

    def __init__(self, x, y, p):
        self.x, self.y, self.p = Fraction(x), Fraction(y), p

    def __add__(self, o):
        return _Surd(self.x + o.x, self.y + o.y, self.p)

    def __mul__(self, o):
        if not isinstance(o, _Surd):
            return _Surd(self.x * o, self.y * o, self.p)
        return _Surd(self.x * o.x + self.p * self.y * o.y, self.x * o.y + self.y * o.x, self.p)

    @classmethod
    def power(cls, p: int, e: Fraction) -> "_Surd":
        """p^e for e in (1/2) Z."""
        twice = 2 * e
        assert twice.denominator == 1
        k = int(twice)
        if k % 2 == 0:
            return cls(Fraction(p) ** (k // 2), 0, p)
        return cls(0, Fraction(p) ** ((k - 1) // 2), p)


def density_yang(form: QuadForm, p: int, n: int) -> LocalDensity:
    if p == 2:
        raise MethodInvalid("yang_odd needs an odd prime")
    jd = jordan_decompose(form, p)
    nu = jd.nu
    units = jd.units
    a = valuation(n, p)
    t = n // p ** a
    eps = jacobi(-1, p)

    def V(l):
        return [i for i, x in enumerate(nu) if x - l < 0 and (x - l) % 2 == 1]

    def d(l):
        return l + Fraction(sum(x - l for x in nu if x < l), 2)

    def vsign(l):
        idx = V(l)
        s = eps ** (len(idx) // 2)
        for i in idx:
            s *= jacobi(units[i], p)
        return s

    total = _Surd(1, 0, p)
    # (1 - 1/p), as in the original theorem; the sign is confirmed by residue counts
    coef = 1 - Fraction(1, p)
    for l in range(1, a + 1):
        if len(V(l)) % 2 == 0:
            total = total + _Surd.power(p, d(l)) * (coef * vsign(l))
    last = V(a + 1)
    if len(last) % 2 == 0:
        f = _Surd(Fraction(-1, p), 0, p)
    else:
        f = _Surd(0, Fraction(jacobi(t, p), p), p)        # (t/p) / sqrt(p)
    total = total + _Surd.power(p, d(a + 1)) * f * vsign(a + 1)
    if total.y != 0:
        raise AssertionError("surd part did not cancel")
    return LocalDensity(total.x, p, n, "yang_odd", surd_part=total.y)


def density_unramified(form: QuadForm, p: int, n: int) -> LocalDensity:
    m = form.m
    if p == 2 or n % p == 0 or form.level % p == 0:
        raise MethodInvalid("siegel_unramified needs p not dividing 2nN")
    det_a = Fraction(form.det, 2 ** m)
    det_a = det_a.numerator * pow(det_a.denominator, -1, p)
    if m % 2 == 0:
        chi = jacobi((-1) ** (m // 2) * det_a, p)
        value = 1 - Fraction(chi, p ** (m // 2))
    else:
        chi = jacobi((-1) ** ((m - 1) // 2) * n * det_a, p)
        value = 1 + Fraction(chi, p ** ((m - 1) // 2))
    return LocalDensity(value, p, n, "siegel_unramified")


def density(form: QuadForm, p: int, n: int, method: str = "auto") -> LocalDensity:
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be positive")
    if method == "auto":
        if p != 2 and n % p and form.level % p:
            method = "siegel_unramified"
        elif p != 2:
            method = "yang_odd"
        else:
            method = "bruteforce"
    if method == "bruteforce":
        return density_bruteforce(form, p, n)
    if method == "yang_odd":
        return density_yang(form, p, n)
    if method == "siegel_unramified":
        return density_unramified(form, p, n)
    raise MethodInvalid(f"unknown method {method!r}")


# ----------------------------------------------------------------------
# Euler product
# ----------------------------------------------------------------------

@dataclass
class DensityProduct:
    value: float
    ramified: dict[int, Fraction]
    cutoff: int
    last_decade_change: float

    def to_json(self) -> dict:
        return {"value": self.value, "cutoff": self.cutoff,
                "ramified": {str(p): str(b) for p, b in self.ramified.items()},
                "last_decade_change": self.last_decade_change}


def _unramified_log_factors(form: QuadForm, n: int, primes: np.ndarray) -> np.ndarray:
    m = form.m
    det_a = Fraction(form.det, 2 ** m)
    # the symbol only depends on the square class; clear the power-of-two denominator
    num = det_a.numerator * det_a.denominator
    if m % 2 == 0:
        chi = legendre_array((-1) ** (m // 2) * num, primes)
        return np.log1p(-chi / primes.astype(float) ** (m // 2))
    chi = legendre_array((-1) ** ((m - 1) // 2) * n * num, primes)
    return np.log1p(chi / primes.astype(float) ** ((m - 1) // 2))


def density_product(form: QuadForm, n: int, cutoff: int = 10**5) -> DensityProduct:
    """prod_p beta_p(n, Q): exact at p | 2nN, Siegel's factor at the other p <= cutoff."""
    if cutoff < 100:
        raise ValueError("cutoff must be >= 100")
    bad = sorted(set(prime_divisors(2 * n * form.level)))
    ramified = {p: density(form, p, n).value for p in bad}
    primes = primes_upto(cutoff)
    primes = primes[~np.isin(primes, bad)]
    logs = _unramified_log_factors(form, n, primes)
    head = float(np.sum(logs[primes <= cutoff // 10]))
    tail = float(np.sum(logs))
    ram = math.prod(float(b) for b in ramified.values())
    value = ram * math.exp(tail)
    change = abs(math.expm1(tail - head)) if ram else 0.0
    return DensityProduct(value, ramified, cutoff, change)


# ----------------------------------------------------------------------
# Hanke-type lower bounds
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HankeBound:
    bound: Fraction | float
    solution_type: str
    nu: int | None


def _primitive_count(jd: JordanDecomposition, n: int, a: int, level_scale: int) -> int:
    """Solutions mod p^a with every block of scale < s divisible by p and a unit
    coordinate in some block of scale s."""
    below = ["zero" if b.scale < level_scale else None for b in jd.blocks]
    upto = ["zero" if b.scale <= level_scale else None for b in jd.blocks]
    return (_count_blocks(jd.blocks, n, jd.p, a, below)
            - _count_blocks(jd.blocks, n, jd.p, a, upto))


def hanke_modulus_exponent(form: QuadForm, p: int, n: int) -> int:
    """The a such that primitive solutions are searched modulo p^a."""
    jd0 = jordan_decompose(form, p)
    smax = max(b.scale for b in jd0.blocks)
    # Hensel lifting of a unit coordinate at scale s needs a > 2 s (+ 2 at p = 2)
    return max(stabilization_start(jd0, n) + 1, 2 * smax + (3 if p != 2 else 5))


def hanke_lower_bound(form: QuadForm, p: int, n: int, want_bound: bool = True) -> HankeBound:
    m = form.m
    if want_bound and m < 4:
        raise DimensionTooSmall("the lower bound needs m >= 4")
    jd0 = jordan_decompose(form, p)
    a = hanke_modulus_exponent(form, p, n)
    jd = jordan_decompose(form, p, max(jd0.precision, a + 1))
    nu = None
    for s in sorted({b.scale for b in jd.blocks}):
        if _primitive_count(jd, n, a, s) > 0:
            nu = s
            break
    if nu is None:
        return HankeBound(Fraction(0), "none", None)
    kind = "good" if nu == 0 else ("badI" if nu == 1 else "badII")
    if not want_bound:
        return HankeBound(Fraction(0), kind, nu)
    g = math.gcd(p ** nu, n)
    if p == 2:
        denom = Fraction(32) * (_sqrt_exact(g) if m == 4 else g)
        bound = 1 / denom if isinstance(denom, Fraction) else 1 / float(denom)
    elif p % 4 == 1:
        bound = 1 - Fraction(1, p)
    else:
        root = _sqrt_exact(g) if m == 4 else Fraction(g)
        bound = (1 - Fraction(1, p)) / root
        if not isinstance(root, Fraction):
            bound = float(bound)
    return HankeBound(bound, kind, nu)


def _sqrt_exact(g: int):
    r = math.isqrt(g)
    return Fraction(r) if r * r == g else math.sqrt(g)
