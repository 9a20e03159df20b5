import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thetanorm.errors import GammaZeroN, GenusMismatch
from thetanorm.forms import det_int, diagonal_form, scramble
from thetanorm.lattice import theta_coefficients
from thetanorm.modular import (cusp_expansion, fourier_magnitudes, gamma0_cosets, gamma0_index,
                               gauss_sum, lift_sl, petersson_norm_estimate, same_genus_check,
                               slash_direct, theta_eval, transform_data)

S = ((0, -1), (1, 0))
R3 = [1, 6, 12, 8, 6, 24, 24, 0, 12, 30, 24]


def test_quadratic_gauss_sums():
    assert gauss_sum(1, 0, 5) == pytest.approx(math.sqrt(5))
    assert gauss_sum(1, 0, 7) == pytest.approx(1j * math.sqrt(7))
    assert gauss_sum(1, 0, 4) == pytest.approx(2 + 2j)


@given(st.integers(1, 200).map(lambda k: 2 * k + 1), st.integers(-50, 50))
def test_gauss_sum_modulus(c, a):
    if math.gcd(a, c) != 1:
        return
    assert abs(gauss_sum(a, 0, c)) ** 2 == pytest.approx(c)


@given(st.integers(2, 60), st.lists(st.integers(-99, 99), min_size=4, max_size=4))
def test_lift_sl(M, entries):
    a, b, c, d = entries
    if math.gcd(a * d - b * c - 1, M) != M:
        # force det = 1 mod M by adjusting d where possible
        if math.gcd(a, M) != 1:
            return
        d = (1 + b * c) * pow(a, -1, M)
    L = lift_sl([[a, b], [c, d]], M)
    assert det_int(L) == 1
    assert all((L[i][j] - [[a, b], [c, d]][i][j]) % M == 0 for i in range(2) for j in range(2))


@pytest.mark.parametrize("N", [1, 4, 12, 28])
def test_gamma0_cosets_are_distinct(N):
    reps = gamma0_cosets(N)
    assert len(reps) == gamma0_index(N)
    for i, (a, b, c, d) in enumerate(reps):
        assert a * d - b * c == 1
        for (a2, b2, c2, d2) in reps[:i]:
            # lower-left entry of g g2^-1
            assert (c * d2 - d * c2) % N != 0


def test_transform_data_at_inversion(three_squares):
    td = transform_data(three_squares, S)
    assert td.D == (1, 1, 1) and td.d_hat == 1
    assert td.amplitude == pytest.approx(8 ** -0.5)
    with pytest.raises(GammaZeroN):
        transform_data(three_squares, ((1, 0), (4, 1)))
    with pytest.raises(ValueError):
        transform_data(three_squares, ((1, 1), (1, 1)))


def test_inversion_magnitudes_follow_poisson(three_squares):
    # theta(-1/z) is theta of the dual lattice scaled by det^(-1/2)
    want = np.array(R3[:6]) / math.sqrt(8)
    for method in ("series", "quadrature"):
        assert np.allclose(fourier_magnitudes(three_squares, S, 5, method=method), want, atol=1e-8)


def test_theta_eval_matches_series(three_squares):
    z = 0.3 + 0.7j
    r = theta_coefficients(three_squares, 200)
    direct = 1 + sum(r[n] * cmath.exp(2j * math.pi * n * z) for n in range(1, 201))
    assert theta_eval(three_squares, z) == pytest.approx(direct, abs=1e-12)


rhos = st.tuples(st.integers(1, 9), st.integers(-9, 9)).filter(lambda cd: math.gcd(*cd) == 1)
small_forms = st.sampled_from([[1, 1, 1], [1, 1, 2], [1, 2, 3], [1, 1, 1, 1], [1, 3]])


@given(small_forms, rhos, st.floats(-0.5, 0.5), st.floats(0.4, 1.5))
def test_cusp_expansion_matches_direct_slash(coeffs, cd, x, y):
    form = diagonal_form(coeffs)
    c, d = cd
    if c % form.level == 0:
        return
    g, a, b = _solve(c, d)
    rho = ((a, b), (c, d))
    z = complex(x, y)
    exp = cusp_expansion(form, rho, 20 * form.level)
    assert abs(exp.evaluate(z)) == pytest.approx(abs(slash_direct(form, rho, z)), rel=1e-6, abs=1e-9)


def _solve(c, d):
    # a d - b c = 1
    for a in range(-abs(c) - 1, abs(c) + 2):
        if (a * d - 1) % c == 0:
            return 1, a, (a * d - 1) // c
    raise AssertionError


@given(small_forms, rhos)
def test_series_and_quadrature_agree(coeffs, cd):
    form = diagonal_form(coeffs)
    c, d = cd
    if c % form.level == 0:
        return
    _, a, b = _solve(c, d)
    rho = ((a, b), (c, d))
    s = fourier_magnitudes(form, rho, 4, method="series")
    q = fourier_magnitudes(form, rho, 4, method="quadrature")
    assert np.allclose(s, q, atol=1e-7)


def test_g_mode_vanishes_on_same_class(three_squares):
    other, _ = scramble(three_squares, random.Random(1))
    est = petersson_norm_estimate(three_squares, other, mode="g", grid=(8, 8))
    assert abs(est.value) <= 1e-8
    assert est.refinement_delta <= 1e-8


def test_genus_mismatch(three_squares):
    with pytest.raises(GenusMismatch):
        same_genus_check(three_squares, diagonal_form([1, 1, 2]))
    with pytest.raises(GenusMismatch):
        petersson_norm_estimate(three_squares, diagonal_form([1, 1, 3]), mode="g")


def test_f_mode_is_small_but_positive_for_one_class_genus(three_squares):
    est = petersson_norm_estimate(three_squares, mode="f", grid=(12, 12))
    assert 0 <= est.value < 1e-3
