"""Integral positive definite quadratic forms q(x) = 1/2 x^T Q x.

A form is given by its Gram matrix Q: symmetric, integral, even diagonal,
positive definite.  All arithmetic here is exact (int / Fraction).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from pathlib import Path
from typing import Sequence

from .errors import NotPositiveDefinite, NotSymmetric, OddDiagonal, ReductionFailure

Matrix = tuple[tuple[int, ...], ...]


# ----------------------------------------------------------------------
# exact matrix helpers
# ----------------------------------------------------------------------

def det_int(mat: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    a = [list(map(int, row)) for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse_frac(mat: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def transpose(a):
    return [list(r) for r in zip(*a)]


def congruent(gram, u):
    """U^T Q U."""
    return matmul(matmul(transpose(u), gram), u)


def identity(m: int) -> list[list[int]]:
    return [[int(i == j) for j in range(m)] for i in range(m)]


def _freeze(mat) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in mat)


# ----------------------------------------------------------------------
# QuadForm
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class QuadForm:
    gram: Matrix
    name: str | None = field(default=None, compare=False)
    det: int = field(init=False, compare=False)
    level: int = field(init=False, compare=False)
    primitive: bool = field(init=False, compare=False)

    def __post_init__(self):
        gram = _freeze(self.gram)
        object.__setattr__(self, "gram", gram)
        m = len(gram)
        if m == 0 or any(len(row) != m for row in gram):
            raise NotSymmetric("gram matrix must be square and non-empty")
        for i in range(m):
            for j in range(i + 1, m):
                if gram[i][j] != gram[j][i]:
                    raise NotSymmetric(f"entry ({i},{j}) differs from ({j},{i})")
        for i in range(m):
            if gram[i][i] % 2:
                raise OddDiagonal(f"diagonal entry {i} is odd")
        for k in range(1, m + 1):
            if det_int([row[:k] for row in gram[:k]]) <= 0:
                raise NotPositiveDefinite(f"leading minor {k} is not positive")
        object.__setattr__(self, "det", det_int(gram))
        object.__setattr__(self, "level", _level(gram))
        coeffs = [gram[i][i] // 2 for i in range(m)] + [
            gram[i][j] for i in range(m) for j in range(i + 1, m)]
        object.__setattr__(self, "primitive", reduce(gcd, coeffs, 0) == 1)

    @property
    def m(self) -> int:
        return len(self.gram)

    def q(self, x: Sequence[int]) -> int:
        g = self.gram
        m = len(g)
        s = sum(g[i][i] * x[i] * x[i] for i in range(m)) // 2
        return s + sum(g[i][j] * x[i] * x[j] for i in range(m) for j in range(i + 1, m))

    def is_diagonal(self) -> bool:
        return all(self.gram[i][j] == 0 for i in range(self.m) for j in range(self.m) if i != j)

    def diag_q(self) -> list[int]:
        """Coefficients a_i of q = sum a_i x_i^2 (diagonal forms only)."""
        return [self.gram[i][i] // 2 for i in range(self.m)]

    def to_json(self) -> dict:
        out = {"gram": [list(r) for r in self.gram]}
        if self.name:
            out["name"] = self.name
        return out


def validate_form(raw, name: str | None = None) -> QuadForm:
    return QuadForm(_freeze(raw), name)


def diagonal_form(coeffs: Sequence[int], name: str | None = None) -> QuadForm:
    """q = sum coeffs[i] x_i^2, i.e. Gram diag(2 a_1, ..., 2 a_m)."""
    m = len(coeffs)
    return QuadForm(tuple(tuple(2 * coeffs[i] if i == j else 0 for j in range(m))
                          for i in range(m)), name)


def form_from_dict(data: dict) -> QuadForm:
    if "gram" in data:
        return validate_form(data["gram"], data.get("name"))
    if "diag_q" in data:
        return diagonal_form(data["diag_q"], data.get("name"))
    raise ValueError("form JSON needs 'gram' or 'diag_q'")


def load_form(path) -> QuadForm:
    return form_from_dict(json.loads(Path(path).read_text()))


# ----------------------------------------------------------------------
# global invariants
# ----------------------------------------------------------------------

def _level(gram: Matrix) -> int:
    # The admissible N are exactly the multiples of the lcm of the
    # denominators of Q^{-1}_ij (i != j) and Q^{-1}_ii / 2.
    inv = inverse_frac(gram)
    m = len(gram)
    dens = [(inv[i][i] / 2).denominator for i in range(m)]
    dens += [inv[i][j].denominator for i in range(m) for j in range(i + 1, m)]
    return reduce(lcm, dens, 1)


def level(form: QuadForm) -> int:
    return form.level


def level_by_scan(form: QuadForm) -> int:
    """Level by scanning divisors of 2 det(Q) times the denominator lcm of Q^{-1}."""
    inv = inverse_frac(form.gram)
    bound = 2 * form.det * reduce(lcm, (x.denominator for row in inv for x in row), 1)
    m = form.m
    for n in range(1, bound + 1):
        if bound % n:
            continue
        ok = all((n * inv[i][j]).denominator == 1 for i in range(m) for j in range(m))
        if ok and all((n * inv[i][i]).numerator % 2 == 0 for i in range(m)):
            return n
    raise AssertionError("level scan found no divisor")


def dual_form(form: QuadForm) -> QuadForm:
    """The form N Q^{-1}."""
    inv = inverse_frac(form.gram)
    n = form.level
    return QuadForm(tuple(tuple(int(n * x) for x in row) for row in inv))


# ----------------------------------------------------------------------
# reduction
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedForm:
    source: QuadForm
    U: Matrix                       # unimodular, columns are the reduced basis
    gram: Matrix                    # U^T Q U
    V: tuple[tuple[Fraction, ...], ...]
    a: tuple[Fraction, ...]


def gram_schmidt(gram) -> tuple[list[list[Fraction]], list[Fraction]]:
    """mu, a with gram = V^T diag(a) V, V[i][j] = mu[j][i] for i < j."""
    m = len(gram)
    mu = [[Fraction(0)] * m for _ in range(m)]
    a: list[Fraction] = []
    for j in range(m):
        for i in range(j):
            s = Fraction(gram[j][i]) - sum(mu[j][k] * mu[i][k] * a[k] for k in range(i))
            mu[j][i] = s / a[i]
        a.append(Fraction(gram[j][j]) - sum(mu[j][k] ** 2 * a[k] for k in range(j)))
        mu[j][j] = Fraction(1)
    return mu, a


def siegel_reduce(form: QuadForm) -> ReducedForm:
    """Unimodular U with U^T Q U in the Siegel domain S(4/3, 1/2).

    Size reduction plus swaps whenever a_{k} < 3/4 a_{k-1}.  Each swap
    strictly lowers a positive integer sub-determinant, so the loop ends.
    """
    m = form.m
    u = identity(m)
    g = [list(r) for r in form.gram]
    k = 1
    three_q = Fraction(3, 4)
    while k < m:
        mu, a = gram_schmidt(g)
        for j in range(k - 1, -1, -1):
            r = (mu[k][j] + Fraction(1, 2)).__floor__()
            if r:
                for row in u:
                    row[k] -= r * row[j]
                g = congruent(form.gram, u)
                mu, a = gram_schmidt(g)
        if a[k] < three_q * a[k - 1]:
            for row in u:
                row[k], row[k - 1] = row[k - 1], row[k]
            g = congruent(form.gram, u)
            k = max(k - 1, 1)
        else:
            k += 1
    mu, a = gram_schmidt(g)
    v = tuple(tuple(mu[j][i] if j >= i else Fraction(0) for j in range(m)) for i in range(m))
    red = ReducedForm(form, _freeze(u), _freeze(g), v, tuple(a))
    check_reduced(red)
    return red


def check_reduced(red: ReducedForm) -> None:
    a, v, m = red.a, red.V, len(red.a)
    n = red.source.level
    prod = reduce(lambda x, y: x * y, a, Fraction(1))
    problems = []
    if prod != red.source.det:
        problems.append("product of a_i differs from det")
    if abs(det_int(red.U)) != 1:
        problems.append("U not unimodular")
    for i in range(m):
        for j in range(i + 1, m):
            if abs(v[i][j]) > Fraction(1, 2):
                problems.append(f"|V[{i}][{j}]| > 1/2")
        if i + 1 < m and a[i] > Fraction(4, 3) * a[i + 1]:
            problems.append(f"a_{i} > 4/3 a_{i + 1}")
        if not Fraction(3, 4) ** i <= a[i] <= Fraction(4, 3) ** (m - 1 - i) * n:
            problems.append(f"a_{i} outside the level bracket")
    if congruent(red.source.gram, red.U) != [list(r) for r in red.gram]:
        problems.append("gram mismatch")
    if problems:
        raise ReductionFailure("; ".join(problems))


def minimum(form: QuadForm) -> int:
    """Smallest value of q on nonzero integer vectors."""
    from .lattice import enumerate_short

    red = siegel_reduce(form)
    bound = red.gram[0][0] // 2
    best = min(v for _, v in enumerate_short(red, bound))
    hermite = (4 / 3) ** ((form.m - 1) / 2) * (form.det / 2 ** form.m) ** (1 / form.m)
    assert best <= hermite + 1e-9, "minimum exceeds Hermite bound"
    return best


# ----------------------------------------------------------------------
# random forms and unimodular matrices (tests, sweeps)
# ----------------------------------------------------------------------

def random_unimodular(m: int, rng: random.Random, steps: int = 12, size: int = 2) -> list[list[int]]:
    u = identity(m)
    for _ in range(steps):
        i, j = rng.sample(range(m), 2)
        k = rng.randint(-size, size)
        for row in u:
            row[i] += k * row[j]
        if rng.random() < 0.3:
            for row in u:
                row[i], row[j] = row[j], -row[i]
    return u


def scramble(form: QuadForm, rng: random.Random) -> tuple[QuadForm, list[list[int]]]:
    u = random_unimodular(form.m, rng)
    return QuadForm(_freeze(congruent(form.gram, u))), u


def random_diagonal_form(rng: random.Random, m: int, max_coeff: int = 27) -> QuadForm:
    return diagonal_form([rng.randint(1, max_coeff) for _ in range(m)])


def random_dense_form(rng: random.Random, m: int, max_entry: int = 50) -> QuadForm:
    """A random positive definite even Gram matrix with entries bounded by max_entry."""
    while True:
        g = [[0] * m for _ in range(m)]
        for i in range(m):
            g[i][i] = 2 * rng.randint(1, max_entry // 2)
            for j in range(i + 1, m):
                g[i][j] = g[j][i] = rng.randint(-max_entry // 4, max_entry // 4)
        try:
            return QuadForm(_freeze(g))
        except NotPositiveDefinite:
            continue
