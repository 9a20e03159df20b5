import math

import pytest
from hypothesis import given, strategies as st
from sympy import divisor_sigma

from thetanorm.eisenstein import (archimedean_factor, exceptional_square_classes, gen_eq_spn_check,
                                  genus_coefficient, genus_series, genus_upper_bound)
from thetanorm.forms import diagonal_form
from thetanorm.lattice import theta_coefficients


def test_four_squares_is_its_genus(four_squares):
    # a one-class genus, so r(gen Q, n) = r(Q, n) = 8 sigma(n) for odd n
    for n in (1, 3, 5, 15, 21):
        assert genus_coefficient(four_squares, n).value == pytest.approx(8 * int(divisor_sigma(n)), rel=1e-4)


def test_genus_series_matches_theta(four_squares):
    E = genus_series(four_squares, 40)
    r = theta_coefficients(four_squares, 40)
    assert E[0] == 1
    assert max(abs(E[n] - r[n]) / r[n] for n in range(1, 41)) < 1e-4


def test_three_squares_genus_coefficient(three_squares):
    g = genus_coefficient(three_squares, 3)
    assert g.value == pytest.approx(8, rel=2e-3)
    assert g.archimedean == pytest.approx(10.8828, abs=1e-4)
    assert g.convergence_flag == "oscillatory"
    assert g.to_json()["finite_part"]["ramified"] == {"2": "1", "3": "8/9"}


def test_archimedean_factor_four_squares(four_squares):
    # (2 pi)^2 n / (Gamma(2) sqrt(16)) = pi^2 n
    assert archimedean_factor(four_squares, 1) == pytest.approx(math.pi ** 2)
    assert archimedean_factor(four_squares, 7) == pytest.approx(7 * math.pi ** 2)


@given(st.integers(1, 200))
def test_upper_bound_formula(n):
    form = diagonal_form([1, 1, 2])
    want = n ** 0.5 * math.sqrt(math.gcd(n, form.level)) / math.sqrt(form.det)
    assert genus_upper_bound(form, n) == pytest.approx(want)
    assert genus_upper_bound(form, n, epsilon=0.1) >= genus_upper_bound(form, n)


def test_upper_bound_rejects_bad_constants(three_squares):
    with pytest.raises(ValueError):
        genus_upper_bound(three_squares, 3, epsilon=-1)


def test_spinor_exceptions(three_squares):
    # N = 4: t = 1 is exceptional exactly when n is a square
    assert exceptional_square_classes(three_squares, 3) == []
    assert exceptional_square_classes(three_squares, 9) == [1]
    assert gen_eq_spn_check(three_squares, 3).reason == "bullet1"
    assert gen_eq_spn_check(three_squares, 9).applies
