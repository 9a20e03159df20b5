"""Theta series at other cusps: Gauss sums, transformation data and Fourier magnitudes.

Only magnitudes of transformed coefficients are meaningful here; phases
depend on branch conventions for (cz + d)^(m/2) that are never tracked.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import prime_divisors, valuation
from .errors import GammaZeroN, OverflowBudget, PivotFailure, TruncationInsufficient
from .forms import (
    QuadForm,
    congruent,
    det_int,
    dual_form,
    inverse_frac,
    siegel_reduce,
    validate_form,
)
from .lattice import enumerate_short, theta_coefficients
from .padic import jordan_decompose, min_precision

GAUSS_LIMIT = 10**6


def e(x: float) -> complex:
    return cmath.exp(2j * math.pi * x)


def gauss_sum(a: int, b: int, c: int) -> complex:
    """G(a, b, c) = sum_{x mod c} e((a x^2 + b x) / c), by direct summation."""
    if c < 1:
        raise ValueError("c must be positive")
    if c > GAUSS_LIMIT:
        raise OverflowBudget(f"c = {c} exceeds the direct-summation limit")
    x = np.arange(c, dtype=np.int64)
    k = ((a % c) * ((x * x) % c) + (b % c) * x) % c
    return complex(np.exp(2j * np.pi * k / c).sum())


# ----------------------------------------------------------------------
# lifting SL_m(Z/M) to SL_m(Z)
# ----------------------------------------------------------------------

def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _complete_column(col: list[int]) -> tuple[list[list[int]], list[list[int]]]:
    """E in SL_m(Z) with E col = e_1, and its inverse (col must be primitive)."""
    m = len(col)
    E = [[int(i == j) for j in range(m)] for i in range(m)]
    Einv = [row[:] for row in E]
    v = list(col)
    for i in range(1, m):
        if v[i] == 0:
            continue
        g, x, y = _ext_gcd(v[0], v[i])
        p, q = v[0] // g, v[i] // g
        # rows (0, i) <- [[x, y], [-q, p]] (rows 0, i); inverse [[p, -y], [q, x]]
        r0, ri = E[0], E[i]
        E[0] = [x * s + y * t for s, t in zip(r0, ri)]
        E[i] = [-q * s + p * t for s, t in zip(r0, ri)]
        c0 = [row[0] for row in Einv]
        ci = [row[i] for row in Einv]
        for k in range(m):
            Einv[k][0] = c0[k] * p + ci[k] * q
            Einv[k][i] = -c0[k] * y + ci[k] * x
        v[0], v[i] = g, 0
    if v[0] == -1:
        # flip the signs of rows 0 and 1, which keeps the determinant
        E[0], E[1] = [-x for x in E[0]], [-x for x in E[1]]
        for row in Einv:
            row[0], row[1] = -row[0], -row[1]
        v[0] = 1
    if v[0] != 1:
        raise PivotFailure("column is not primitive")
    return E, Einv


def lift_sl(A: Sequence[Sequence[int]], M: int) -> list[list[int]]:
    """An integer matrix of determinant 1 congruent to A modulo M (det A = 1 mod M)."""
    m = len(A)
    half = M // 2
    A = [[(int(x) % M) - (M if int(x) % M > half else 0) for x in row] for row in A]
    if det_int(A) % M != 1 % M:
        raise PivotFailure("determinant is not 1 modulo M")
    if m == 1:
        return [[1]]
    col = [A[i][0] for i in range(m)]
    if math.gcd(*col) != 1:
        g = math.gcd(*col[1:])
        if g == 0:
            col[1] += M
            g = abs(col[1])
        k = 0
        while math.gcd(col[0] + k * M, g) != 1:
            k += 1
            if k > 10**6:
                raise PivotFailure("could not make the first column primitive")
        col[0] += k * M
    E, Einv = _complete_column(col)
    Ap = [[sum(E[i][k] * A[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    # column operations clearing row 0: C = Ap F, F = I - e_0 (Ap[0][1:])
    F = [[int(i == j) for j in range(m)] for i in range(m)]
    Finv = [row[:] for row in F]
    for j in range(1, m):
        F[0][j] = -Ap[0][j]
        Finv[0][j] = Ap[0][j]
    C = [[sum(Ap[i][k] * F[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    inner = lift_sl([row[1:] for row in C[1:]], M)
    blk = [[int(i == j) if (i == 0 or j == 0) else inner[i - 1][j - 1] for j in range(m)]
           for i in range(m)]
    tmp = [[sum(Einv[i][k] * blk[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    out = [[sum(tmp[i][k] * Finv[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
    assert det_int(out) == 1
    assert all((out[i][j] - A[i][j]) % M == 0 for i in range(m) for j in range(m))
    return out


def _crt(residues: Sequence[tuple[int, int]]) -> tuple[int, int]:
    x, mod = 0, 1
    for r, mm in residues:
        g, u, _ = _ext_gcd(mod, mm)
        assert g == 1
        x = (x + (r - x) * u % mm * mod) % (mod * mm)
        mod *= mm
    return x, mod


# ----------------------------------------------------------------------
# transformation data
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TransformData:
    form: QuadForm
    rho: tuple[tuple[int, int], tuple[int, int]]
    c_split: tuple[int, int]
    U: tuple[tuple[int, ...], ...]
    D: tuple[int, ...]
    d: int
    d_hat: int
    S: QuadForm
    eta_rule: tuple[str, ...]            # "one" or "sqrt2_odd" per coordinate
    amplitude: float

    def to_json(self) -> dict:
        return {"rho": [list(r) for r in self.rho], "c_split": list(self.c_split),
                "U": [list(r) for r in self.U], "D": list(self.D), "d": self.d,
                "d_hat": self.d_hat, "S": [list(r) for r in self.S.gram],
                "eta_rule": list(self.eta_rule), "amplitude": self.amplitude}


def _normalise_rho(rho) -> tuple[int, int, int, int]:
    (a, b), (c, d) = rho
    if a * d - b * c != 1:
        raise ValueError("rho must have determinant 1")
    if c < 0:
        a, b, c, d = -a, -b, -c, -d
    return a, b, c, d


def transform_data(form: QuadForm, rho) -> TransformData:
    a, b, c, d = _normalise_rho(rho)
    N = form.level
    if c % N == 0:
        raise GammaZeroN("rho lies in Gamma_0(N)")
    m = form.m
    t = valuation(c, 2)
    ct = c >> t

    # local splittings, at a precision well beyond what the congruences need
    pieces: list[tuple[int, tuple[tuple[int, ...], ...]]] = []
    for p in prime_divisors(ct):
        prec = max(valuation(ct, p), 2 * min_precision(form, p))
        pieces.append((p ** prec, jordan_decompose(form, p, prec).witness))
    prec2 = max(t, 2 * min_precision(form, 2))
    jd2 = jordan_decompose(form, 2, prec2)
    pieces.append((2 ** prec2, jd2.witness))

    mod = math.prod(mm for mm, _ in pieces)
    U0 = [[_crt([(w[i][j], mm) for mm, w in pieces])[0] for j in range(m)] for i in range(m)]
    delta = det_int(U0) % mod
    inv = pow(delta, -1, mod)
    for i in range(m):
        U0[i][m - 1] = U0[i][m - 1] * inv % mod
    U = lift_sl(U0, mod)
    Qt = congruent(form.gram, U)

    D = []
    eta = []
    coord_blocks = []
    for blk in jd2.blocks:
        coord_blocks.extend([blk] * blk.dim)
    for i in range(m):
        dt = math.gcd(math.gcd(Qt[i][i] // 2, ct), N)
        blk = coord_blocks[i]
        nu = min(blk.scale, t)
        if blk.kind != "U":
            ti, rule = nu, "one"
        else:
            ti = nu if t <= nu + 1 else nu + 1
            rule = "sqrt2_odd" if t == nu + 1 else "one"
        D.append(dt * 2 ** ti)
        eta.append(rule)

    dd = math.gcd(c, N)
    d_hat = dd // 2 if (valuation(N, 2) == 2 and valuation(dd, 2) == 1 and 2 * jd2.r2 < m) else dd
    inv_qt = inverse_frac(Qt)
    scale = Fraction(N, d_hat)
    S_frac = [[scale * D[i] * inv_qt[i][j] * D[j] for j in range(m)] for i in range(m)]
    if any(x.denominator != 1 for row in S_frac for x in row):
        raise PivotFailure("S is not integral")
    S = validate_form([[int(x) for x in row] for row in S_frac])
    if S.level > N:
        raise PivotFailure(f"level of S is {S.level} > {N}")
    amp = math.sqrt(math.prod(D)) / math.sqrt(form.det)
    return TransformData(form, ((a, b), (c, d)), (ct, t), tuple(tuple(r) for r in U),
                         tuple(D), dd, d_hat, S, tuple(eta), amp)


# ----------------------------------------------------------------------
# theta series at the cusp rho(infinity)
# ----------------------------------------------------------------------

def _gauss_table(form: QuadForm, a: int, c: int) -> np.ndarray:
    """G[x mod c] = sum_{v mod c} e(v.x / c + a q(v) / c) for every residue x."""
    m = form.m
    if c ** m > 10**7:
        raise OverflowBudget(f"c^m = {c ** m} residues is too many")
    grids = np.meshgrid(*([np.arange(c)] * m), indexing="ij")
    v = np.stack([g.ravel() for g in grids])
    gram = np.array(form.gram, dtype=np.int64)
    qv = np.einsum("ik,ij,jk->k", v, gram, v) // 2
    w = np.exp(2j * np.pi * ((a * qv) % c) / c).reshape([c] * m)
    return np.fft.ifftn(w) * c ** m


@dataclass
class CuspExpansion:
    """theta(Q)|[rho](z) = sum_x alpha(x) e(val(x) z / N), val(x) = x^T N Q^{-1} x / 2."""

    rho: tuple[int, int, int, int]
    N: int
    vals: np.ndarray            # integer exponents val(x)
    alpha: np.ndarray           # complex weights
    bound: int                  # all x with val(x) <= bound are included

    def coefficients(self, step: int) -> np.ndarray:
        """Aggregate alpha over val = step * n for n = 0 .. bound // step."""
        out = np.zeros(self.bound // step + 1, dtype=complex)
        on = self.vals % step == 0
        np.add.at(out, self.vals[on] // step, self.alpha[on])
        off = np.abs(self.alpha[~on])
        if off.size and off.max() > 1e-8:
            raise PivotFailure("nonzero weight off the expected exponent lattice")
        return out

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        coef = self.coefficients(1)
        ex = np.exp(2j * np.pi * np.multiply.outer(z, np.arange(len(coef))) / self.N)
        return ex @ coef


def cusp_expansion(form: QuadForm, rho, bound: int) -> CuspExpansion:
    a, b, c, d = _normalise_rho(rho)
    if c == 0:
        raise GammaZeroN("c = 0: the expansion at infinity is theta itself")
    N = form.level
    m = form.m
    dual = dual_form(form)
    red = siegel_reduce(dual)
    xs = [(0,) * m]
    vals = [0]
    for x, val in enumerate_short(red, bound):
        xs.append(x)
        vals.append(val)
    X = np.array(xs, dtype=np.int64).reshape(len(xs), m)
    vals = np.array(vals, dtype=np.int64)
    table = _gauss_table(form, a, c)
    G = table[tuple((X % c).T)]
    pref = cmath.exp(2j * math.pi * 3 * m / 8) / (c ** (m / 2) * math.sqrt(form.det))
    phase = np.exp(2j * np.pi * ((d * vals) % (N * c)) / (N * c))
    return CuspExpansion((a, b, c, d), N, vals, pref * phase * G, bound)


def slash_direct(form: QuadForm, rho, z: complex, X: int | None = None) -> complex:
    """(cz + d)^(-m/2) theta(Q, rho z) up to a phase; only |.| is meaningful."""
    a, b, c, d = _normalise_rho(rho)
    w = (a * z + b) / (c * z + d)
    return abs(c * z + d) ** (-form.m / 2) * theta_eval(form, w, X)


def fourier_magnitudes(form: QuadForm, rho, nmax: int, method: str = "quadrature",
                       y0: float = 1.0) -> np.ndarray:
    """|a(n)| for 0 <= n <= nmax in theta(Q)|[rho] = sum a(n) e(d_hat n z / N).

    ``series`` sums alpha(x) over each shell; ``quadrature`` samples the
    expansion on a horizontal line and integrates against e(-d_hat n x / N)
    with the trapezoid rule.
    """
    td = transform_data(form, rho)
    N, dh = form.level, td.d_hat
    bound = max(dh * (nmax + 1), int(math.ceil(N * 45 / (2 * math.pi * y0))))
    exp = cusp_expansion(form, rho, bound)
    coef = exp.coefficients(dh)
    if method == "series":
        return np.abs(coef[: nmax + 1])
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    M = max(4 * N * nmax, 2 * len(coef) + 1)
    period = N / dh
    xk = np.arange(M) * period / M
    n_all = np.arange(len(coef))
    samples = np.exp(2j * np.pi * np.multiply.outer(xk + 1j * y0, n_all) * dh / N) @ coef
    out = np.empty(nmax + 1)
    for n in range(nmax + 1):
        integral = np.mean(samples * np.exp(-2j * np.pi * n * np.arange(M) / M))
        out[n] = abs(integral) * math.exp(2 * math.pi * n * dh * y0 / N)
    return out


# ----------------------------------------------------------------------
# numerical theta values
# ----------------------------------------------------------------------

def coefficient_bound(form: QuadForm, n: np.ndarray) -> np.ndarray:
    """#{x : q(x) <= n} <= prod_i (2 sqrt(2n / a_i) + 1) over the reduced Gram-Schmidt a_i."""
    red = siegel_reduce(form)
    n = np.asarray(n, dtype=float)
    out = np.ones_like(n)
    for ai in red.a:
        out *= 2 * np.sqrt(2 * n / float(ai)) + 1
    return out


def _tail(bound_fn, y: float, X: int) -> float:
    """sum_{n > X} bound(n) e^{-2 pi n y}, summed until the terms are negligible."""
    stop = X + int(60 / (2 * math.pi * y)) + 10
    n = np.arange(X + 1, stop + 1)
    terms = bound_fn(n) * np.exp(-2 * math.pi * n * y)
    return float(terms.sum())


def truncation_for(form: QuadForm, y: float, tol: float = 1e-12, factor: float = 1.0) -> int:
    """Smallest X with factor * tail(X) < tol."""
    fn = lambda n: factor * coefficient_bound(form, n)
    stop = int(120 / (2 * math.pi * y)) + 50
    n = np.arange(1, stop + 1)
    terms = fn(n) * np.exp(-2 * math.pi * n * y)
    tails = np.cumsum(terms[::-1])[::-1]          # tails[k] = sum_{n >= k+1}
    ok = np.flatnonzero(tails < tol)
    return int(ok[0]) if ok.size else stop


_THETA_CACHE: dict = {}


def _theta_coeffs(form: QuadForm, X: int) -> np.ndarray:
    key = form.gram
    have = _THETA_CACHE.get(key)
    if have is None or len(have) <= X:
        th = theta_coefficients(form, max(X, 16))
        have = np.array([1] + th.r, dtype=float)
        _THETA_CACHE[key] = have
    return have[: X + 1]


def theta_eval(form: QuadForm, z: complex, X: int | None = None, tol: float = 1e-12) -> complex:
    y = z.imag
    if y <= 0:
        raise ValueError("need Im z > 0")
    if X is None:
        X = truncation_for(form, y, tol)
    elif _tail(lambda n: coefficient_bound(form, n), y, X) * 2 >= tol:
        raise TruncationInsufficient(f"X = {X} leaves a tail above {tol}")
    coef = _theta_coeffs(form, X)
    return complex(np.polynomial.polynomial.polyval(cmath.exp(2j * math.pi * z), coef))


# ----------------------------------------------------------------------
# Petersson norm by quadrature over coset translates of the SL_2(Z) domain
# ----------------------------------------------------------------------

def gamma0_index(N: int) -> int:
    out = N
    for p in prime_divisors(N):
        out = out // p * (p + 1)
    return out


def gamma0_cosets(N: int) -> list[tuple[int, int, int, int]]:
    """Right coset representatives of Gamma_0(N) in SL_2(Z), one per point of P^1(Z/N).

    Each representative has the smallest possible |c|, which keeps the
    images of the fundamental domain away from the real axis.
    """
    units = [u for u in range(1, N + 1) if math.gcd(u, N) == 1]
    seen = set()
    reps = []
    for c in range(N):
        for d in range(N):
            if math.gcd(math.gcd(c, d), N) != 1:
                continue
            orbit = [((u * c) % N, (u * d) % N) for u in units]
            key = min(orbit)
            if key in seen:
                continue
            seen.add(key)
            best = min(orbit, key=lambda cd: (min(cd[0], N - cd[0]) if cd[0] else 0, cd))
            cc, dd = best
            C = cc if cc <= N // 2 else cc - N
            if N == 1:
                C, dd = 0, 1
            k = 0
            while True:
                for D in (dd + k * N, dd - k * N):
                    if math.gcd(C, D) == 1:
                        break
                else:
                    k += 1
                    continue
                break
            g, x, y = _ext_gcd(D, C)
            reps.append((x, -y, C, D))
    assert len(reps) == gamma0_index(N)
    return reps


@dataclass
class NormEstimate:
    value: float
    mode: str
    quadrature: dict
    refinement_delta: float

    def to_json(self) -> dict:
        return {"value": self.value, "mode": self.mode, "quadrature": self.quadrature,
                "refinement_delta": self.refinement_delta}


def same_genus_check(q1: QuadForm, q2: QuadForm, samples: int = 20) -> None:
    """Necessary conditions for q1, q2 to lie in one genus; raises GenusMismatch."""
    from .errors import GenusMismatch
    from .padic import density, local_primes

    if q1.m != q2.m or q1.level != q2.level or q1.det != q2.det:
        raise GenusMismatch("dimension, level or determinant differ")
    for p in local_primes(q1):
        j1, j2 = jordan_decompose(q1, p), jordan_decompose(q2, p)
        if sorted(j1.nu) != sorted(j2.nu) or j1.r2 != j2.r2:
            raise GenusMismatch(f"Jordan scales differ at {p}")
        for n in range(1, samples + 1):
            if density(q1, p, n).value != density(q2, p, n).value:
                raise GenusMismatch(f"local densities differ at p = {p}, n = {n}")


def _grid_points(cosets, N: int, nx: int, ny: int, tol: float):
    gx, wx = np.polynomial.legendre.leggauss(nx)
    gu, wu = np.polynomial.legendre.leggauss(ny)
    xs = 0.5 * gx
    wxs = 0.5 * wx
    pts, wts = [], []
    for (A, B, C, D) in cosets:
        dj = math.gcd(C, N) if C else N
        ycap = max(1.5, N * math.log(1 / tol) / (2 * math.pi * dj))
        u_lo = 1.0 / ycap
        u_hi = 1.0 / np.sqrt(1.0 - xs ** 2)
        half = 0.5 * (u_hi - u_lo)
        u = u_lo + half[:, None] * (gu[None, :] + 1.0)
        w = (wxs * half)[:, None] * wu[None, :]
        z = xs[:, None] + 1j / u
        gz = (A * z + B) / (C * z + D)
        pts.append(gz.ravel())
        wts.append(w.ravel())
    return np.concatenate(pts), np.concatenate(wts)


def _evaluate_series(coef: np.ndarray, w: np.ndarray, bands: list[tuple[np.ndarray, int]]) -> np.ndarray:
    out = np.zeros(len(w), dtype=complex)
    for idx, X in bands:
        q = np.exp(2j * np.pi * w[idx])
        acc = np.zeros(len(idx), dtype=complex)
        for n in range(X, 0, -1):
            acc = (acc + coef[n]) * q
        out[idx] = acc
    return out


def _integrate(coef_fn, bound_form: QuadForm, m: int, N: int, cosets, nx: int, ny: int,
               floor: float, tol: float):
    from .errors import DepthBudget

    w, wts = _grid_points(cosets, N, nx, ny, tol)
    im = w.imag
    lo = float(im.min())
    if lo < floor:
        raise DepthBudget(f"minimum Im = {lo:.3g} below floor {floor:g}")
    # bands of Im in ratio 1.5, each with its own truncation
    edges = [lo]
    while edges[-1] < im.max():
        edges.append(edges[-1] * 1.5)
    order = np.digitize(im, edges[1:])
    bands = []
    xmax = 0
    for k in range(len(edges)):
        idx = np.flatnonzero(order == k)
        if idx.size == 0:
            continue
        X = truncation_for(bound_form, edges[k], tol * 1e-3, factor=2.0)
        bands.append((idx, X))
        xmax = max(xmax, X)
    coef = coef_fn(xmax)
    vals = _evaluate_series(coef, w, bands)
    integrand = np.abs(vals) ** 2 * im ** (m / 2)
    return float(np.sum(integrand * wts)), xmax, lo


def petersson_norm_estimate(form: QuadForm, other: QuadForm | None = None, mode: str = "f",
                            grid: tuple[int, int] = (24, 24), floor: float = 1e-3,
                            tol: float = 1e-9, cutoff: int = 10**4) -> NormEstimate:
    """<f, f> = int over Gamma_0(N)\\H of |f|^2 y^(m/2) dmu by Gauss-Legendre quadrature.

    mode "g": f = theta(Q) - theta(Q') for Q' in the genus of Q.
    mode "f": f = theta(Q) - E with E the genus series (from local densities).
    """
    from .eisenstein import genus_series

    m, N = form.m, form.level
    if mode == "g":
        if other is None:
            raise ValueError("mode g needs a second form")
        same_genus_check(form, other)

        def coef_fn(X):
            return _theta_coeffs(form, X) - _theta_coeffs(other, X)
    elif mode == "f":
        cache: dict = {}

        def coef_fn(X):
            if cache.get("X", -1) < X:
                cache["X"] = X
                cache["E"] = genus_series(form, X, cutoff)
            return _theta_coeffs(form, X) - cache["E"][: X + 1]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    cosets = gamma0_cosets(N)
    nx, ny = grid
    coarse, _, _ = _integrate(coef_fn, form, m, N, cosets, nx, ny, floor, tol)
    fine, xmax, lo = _integrate(coef_fn, form, m, N, cosets, 2 * nx, 2 * ny, floor, tol)
    scale = max(abs(fine), abs(coarse))
    delta = abs(fine - coarse) / scale if scale > 1e-300 else 0.0
    quad = {"grid": [nx, ny], "refined_grid": [2 * nx, 2 * ny], "X": xmax, "mu": len(cosets),
            "floor": floor, "min_im": lo}
    return NormEstimate(fine, "g_pair" if mode == "g" else "f_eisenstein", quad, delta)
