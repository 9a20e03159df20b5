"""Exact representation counts r(Q, n) and theta coefficients.

Enumeration runs in the coordinates of the Siegel-reduced basis,
q(y) = sum_i a_i/2 (y_i + sum_{j>i} mu_ji y_j)^2, from the last coordinate
down.  Interval bounds come from floats widened by a safety margin; every
accepted vector is checked with exact integer arithmetic, and the first
coordinate is solved exactly from the binary remainder A y0^2 + B y0 + C.

Vectors are produced in lexicographic order of the reversed reduced
coordinates (y_{m-1}, ..., y_0), then mapped back through U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import BudgetExceeded
from .forms import QuadForm, ReducedForm, siegel_reduce

DEFAULT_BUDGET = 10**9
_SLACK = 1e-9
_INT64_SAFE = 2**52


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, k: int = 1) -> None:
        self.used += k
        if self.used > self.limit:
            raise BudgetExceeded(f"enumeration exceeded {self.limit} nodes")


@dataclass
class ThetaCoefficients:
    form: QuadForm
    X: int
    r: list[int]                      # r[k] = r(Q, k + 1)
    stats: dict = field(default_factory=dict)

    def __getitem__(self, n: int) -> int:
        if n == 0:
            return 1
        return self.r[n - 1]

    def to_json(self) -> dict:
        return {"X": self.X, "r": self.r}


def _interval(center: float, room: float, a: float) -> tuple[int, int]:
    if room < 0:
        return 1, 0
    rad = math.sqrt(2.0 * room / a) * (1 + _SLACK) + _SLACK
    return math.ceil(center - rad), math.floor(center + rad)


def _tails(red: ReducedForm, bound: int, budget: _Budget):
    """Yield (y_tail, h, C, used) for fixed y_{m-1}, ..., y_2.

    h[k] = sum over fixed j of G_kj y_j and C = q restricted to the fixed
    coordinates (exact).  For m <= 2 a single empty tail is produced.
    """
    g = red.gram
    m = len(g)
    a = [float(x) for x in red.a]
    mu = [[float(red.V[i][j]) for j in range(m)] for i in range(m)]  # V[i][j] = mu_ji

    def rec(i: int, y: list[int], h: list[int], c: int, used: float):
        if i < 2:
            yield y, h, c, used
            return
        center = -sum(mu[i][j] * y[j] for j in range(i + 1, m))
        lo, hi = _interval(center, bound - used, a[i])
        for yi in range(lo, hi + 1):
            budget.spend()
            u2 = used + 0.5 * a[i] * (yi - center) ** 2
            if u2 > bound * (1 + _SLACK) + _SLACK:
                continue
            c2 = c + (g[i][i] // 2) * yi * yi + yi * h[i]
            h2 = [h[k] + g[k][i] * yi for k in range(m)]
            y2 = list(y)
            y2[i] = yi
            yield from rec(i - 1, y2, h2, c2, u2)

    yield from rec(m - 1, [0] * m, [0] * m, 0, 0.0)


def _level1_arrays(red: ReducedForm, bound: int, y, h, c, used):
    """Vectorised y1 range with the exact binary coefficients for y0."""
    g = red.gram
    m = len(g)
    if m == 1:
        return (np.zeros(1, dtype=np.int64), g[0][0] // 2,
                np.zeros(1, dtype=np.int64), np.full(1, c, dtype=np.int64))
    a1 = float(red.a[1])
    center = -sum(float(red.V[1][j]) * y[j] for j in range(2, m))
    lo, hi = _interval(center, bound - used, a1)
    y1 = np.arange(lo, hi + 1, dtype=np.int64)
    A = g[0][0] // 2
    B = h[0] + g[0][1] * y1
    C = c + (g[1][1] // 2) * y1 * y1 + y1 * h[1]
    return y1, A, B, C


def _check_size(bound: int, red: ReducedForm) -> None:
    big = max(abs(x) for row in red.gram for x in row)
    if bound * big * 16 > _INT64_SAFE:
        raise BudgetExceeded("bound too large for the vectorised int64 path")


def _solve_y0(A: int, B: np.ndarray, C: np.ndarray, n: int):
    """Integer roots y0 of A y0^2 + B y0 + C = n, per entry (at most two)."""
    disc = B * B - 4 * A * (C - n)
    ok = disc >= 0
    s = np.zeros_like(disc)
    s[ok] = np.floor(np.sqrt(disc[ok].astype(np.float64))).astype(np.int64)
    for _ in range(2):
        s = np.where(ok & (s * s > disc), s - 1, s)
        s = np.where(ok & ((s + 1) * (s + 1) <= disc), s + 1, s)
    ok &= s * s == disc
    roots = []
    for sign in (-1, 1):
        num = -B + sign * s
        good = ok & (num % (2 * A) == 0)
        if sign == 1:
            good &= s != 0          # double root counted once
        roots.append((good, num // (2 * A)))
    return roots


def _iter_solutions(red: ReducedForm, n: int, budget: _Budget) -> Iterator[tuple[int, ...]]:
    """Reduced-coordinate solutions of q(y) = n in enumeration order."""
    m = len(red.gram)
    _check_size(n, red)
    for y, h, c, used in _tails(red, n, budget):
        y1, A, B, C = _level1_arrays(red, n, y, h, c, used)
        budget.spend(len(y1))
        (g_lo, r_lo), (g_hi, r_hi) = _solve_y0(A, B, C, n)
        for idx in range(len(y1)):
            found = []
            if g_lo[idx]:
                found.append(int(r_lo[idx]))
            if g_hi[idx]:
                found.append(int(r_hi[idx]))
            for y0 in sorted(found):
                vec = list(y)
                vec[0] = y0
                if m > 1:
                    vec[1] = int(y1[idx])
                if any(vec):
                    yield tuple(vec)


def _to_original(red: ReducedForm, y) -> tuple[int, ...]:
    u = red.U
    m = len(u)
    return tuple(sum(u[i][j] * y[j] for j in range(m)) for i in range(m))


def count_representations(form: QuadForm, n: int, budget: int = DEFAULT_BUDGET,
                          reduced: ReducedForm | None = None) -> int:
    if n < 0:
        return 0
    if n == 0:
        return 1
    red = reduced or siegel_reduce(form)
    return sum(1 for _ in _iter_solutions(red, n, _Budget(budget)))


def representations_list(form: QuadForm, n: int, limit: int | None = None,
                         budget: int = DEFAULT_BUDGET,
                         reduced: ReducedForm | None = None) -> list[tuple[int, ...]]:
    if limit is not None and limit < 1:
        raise ValueError("limit must be >= 1")
    red = reduced or siegel_reduce(form)
    out = []
    for y in _iter_solutions(red, n, _Budget(budget)):
        out.append(_to_original(red, y))
        if limit is not None and len(out) >= limit:
            break
    return out


def enumerate_short(red: ReducedForm, bound: int, budget: int = DEFAULT_BUDGET):
    """Yield (x, q(x)) for all nonzero x with q(x) <= bound, x in original coordinates."""
    bud = _Budget(budget)
    for y, vals in _iter_ball(red, bound, bud):
        yield _to_original(red, y), vals


def _iter_ball(red: ReducedForm, bound: int, budget: _Budget):
    g = red.gram
    m = len(g)
    a0 = float(red.a[0])
    for y, h, c, used in _tails(red, bound, budget):
        y1s, A, Bs, Cs = _level1_arrays(red, bound, y, h, c, used)
        for k in range(len(y1s)):
            B, C = int(Bs[k]), int(Cs[k])
            y1 = int(y1s[k])
            used1 = used
            if m > 1:
                center1 = -sum(float(red.V[1][j]) * y[j] for j in range(2, m))
                used1 = used + 0.5 * float(red.a[1]) * (y1 - center1) ** 2
            center0 = -B / (2 * A)
            lo, hi = _interval(center0, bound - used1, a0)
            budget.spend(max(hi - lo + 1, 1))
            for y0 in range(lo, hi + 1):
                val = A * y0 * y0 + B * y0 + C
                if val <= bound and (y0 or y1 or any(y[2:])):
                    vec = list(y)
                    vec[0] = y0
                    if m > 1:
                        vec[1] = y1
                    yield tuple(vec), val


def theta_coefficients(form: QuadForm, X: int, budget: int = DEFAULT_BUDGET,
                       reduced: ReducedForm | None = None) -> ThetaCoefficients:
    """r(Q, n) for 1 <= n <= X from a single enumeration of the ball q <= X."""
    if X < 1:
        raise ValueError("X must be >= 1")
    if reduced is None and form.is_diagonal():
        return _theta_diagonal(form, X, _Budget(budget))
    red = reduced or siegel_reduce(form)
    _check_size(X, red)
    bud = _Budget(budget)
    g = red.gram
    m = len(g)
    A = g[0][0] // 2
    a0 = float(red.a[0])
    counts = np.zeros(X + 1, dtype=np.int64)
    for y, h, c, used in _tails(red, X, bud):
        y1s, _, Bs, Cs = _level1_arrays(red, X, y, h, c, used)
        if m > 1:
            center1 = -sum(float(red.V[1][j]) * y[j] for j in range(2, m))
        for k in range(len(y1s)):
            used1 = used
            if m > 1:
                used1 = used + 0.5 * float(red.a[1]) * (int(y1s[k]) - center1) ** 2
            B, C = int(Bs[k]), int(Cs[k])
            lo, hi = _interval(-B / (2 * A), X - used1, a0)
            if hi < lo:
                continue
            y0 = np.arange(lo, hi + 1, dtype=np.int64)
            bud.spend(len(y0))
            vals = A * y0 * y0 + B * y0 + C
            vals = vals[(vals >= 0) & (vals <= X)]
            counts += np.bincount(vals, minlength=X + 1)
    counts[0] -= 1                    # the zero vector
    assert counts[0] == 0
    return ThetaCoefficients(form, X, [int(v) for v in counts[1:]], {"nodes": bud.used})


def _theta_diagonal(form: QuadForm, X: int, bud: _Budget) -> ThetaCoefficients:
    """Product of one-variable theta series, by exact integer convolution.

    Each factor is charged (X + 1) nodes per one-variable term, the work of
    adding its shifted copies.
    """
    counts = np.zeros(X + 1, dtype=np.int64)
    counts[0] = 1
    for a in form.diag_q():
        one = np.zeros(X + 1, dtype=np.int64)
        k = np.arange(1, math.isqrt(X // a) + 1)
        bud.spend((X + 1) * (len(k) + 1))
        one[0] = 1
        one[a * k * k] = 2
        counts = np.convolve(counts, one)[: X + 1]
    return ThetaCoefficients(form, X, [int(v) for v in counts[1:]],
                            {"nodes": bud.used, "method": "convolution"})


def find_representation(form: QuadForm, n: int, budget: int = DEFAULT_BUDGET,
                        reduced: ReducedForm | None = None) -> tuple[int, ...] | None:
    reps = representations_list(form, n, 1, budget, reduced)
    return reps[0] if reps else None


def brute_force_counts(form: QuadForm, X: int) -> list[int]:
    """Oracle: r(Q, n) for n <= X by scanning a box that certainly contains the ball.

    The box radius comes from q(x) >= lambda_min |x|^2 / 2 with the smallest
    eigenvalue bounded below by det / (trace^(m-1)) (AM-GM on the others).
    """
    m = form.m
    tr = sum(form.gram[i][i] for i in range(m))
    lam = form.det / tr ** (m - 1)
    rad = int(math.isqrt(int(2 * X / lam)) + 1)
    rng = np.arange(-rad, rad + 1)
    grids = np.meshgrid(*([rng] * m), indexing="ij")
    pts = np.stack([gr.ravel() for gr in grids])
    gram = np.array(form.gram, dtype=np.int64)
    vals = np.einsum("ik,ij,jk->k", pts, gram, pts) // 2
    vals = vals[(vals >= 1) & (vals <= X)]
    counts = np.bincount(vals, minlength=X + 1)
    return [int(v) for v in counts[1:]]
