import math
import random

import pytest
from hypothesis import given, strategies as st
from sympy import factorint, primerange

from thetanorm.bounds import (BoundConfig, anisotropic_primes, beta_upper, coeff_bounds,
                              dukeiwaniec_profile, eq13_bound, eq21_bound, error_bound_m3,
                              hilbert_symbol, is_anisotropic_hilbert, is_anisotropic_search,
                              n_tilde, norm_bounds, thm1_bound, thm2_bound, thm3_lower,
                              threshold_m45)
from thetanorm.errors import DimensionTooSmall, NotDiagonal
from thetanorm.forms import diagonal_form, validate_form

from conftest import small_form

ternary = st.builds(small_form, st.integers(0, 10**6), st.just(3), st.booleans())
nonzero = st.integers(-200, 200).filter(bool)


def test_norm_bounds_three_squares(three_squares):
    assert thm1_bound(three_squares).value == pytest.approx(2.0)
    assert thm2_bound(three_squares).value == pytest.approx(4 + 2 * math.sqrt(2))
    assert thm3_lower(three_squares).value == pytest.approx(1.0)
    assert [r.kind for r in norm_bounds(three_squares)] == [
        thm1_bound(three_squares).kind, thm2_bound(three_squares).kind, thm3_lower(three_squares).kind]


def test_thm2_needs_diagonal():
    with pytest.raises(NotDiagonal):
        thm2_bound(validate_form([[2, 1, 0], [1, 2, 0], [0, 0, 2]]))


def test_coefficient_bound_values():
    assert eq13_bound(1, 4, 1, 4).value == pytest.approx(1.5)
    assert eq21_bound(1.0, 3, 4).value == pytest.approx(4.8232036584, rel=1e-9)
    assert [r.kind for r in coeff_bounds(1.0, 3, 3, 4)] == ["eq13_petersson", "eq21_dukeiwaniec"]
    assert len(coeff_bounds(1.0, 4, 3, 4)) == 1


def test_ternary_error_bound(three_squares):
    rep = error_bound_m3(three_squares, 3)
    assert rep.value == pytest.approx(5.3452994635, rel=1e-9)
    out = rep.to_json()
    assert (out["n_tilde"], out["v"], out["anisotropic_primes"]) == (3, 4, [2])
    with pytest.raises(DimensionTooSmall):
        error_bound_m3(diagonal_form([1, 1, 1, 1]), 3)


def test_threshold_four_squares(four_squares):
    rep = threshold_m45(four_squares)
    assert rep.value == pytest.approx(576.0)
    assert rep.extra["thresholds"] == pytest.approx([576.0, 384.0])
    with pytest.raises(DimensionTooSmall):
        threshold_m45(diagonal_form([1, 1, 1]))
    assert threshold_m45(diagonal_form([1, 1, 1, 1, 1])).value > 0


def test_beta_upper(four_squares):
    assert beta_upper(four_squares, 8) == pytest.approx(2.0)
    assert beta_upper(four_squares, 3) == pytest.approx(1.0)


@pytest.mark.parametrize("eps, const", [(-0.1, 1.0), (0.0, 0.0), (float("nan"), 1.0)])
def test_bound_config_rejects(eps, const):
    with pytest.raises(ValueError):
        BoundConfig(eps, const)


@given(st.floats(0.5, 10), st.integers(1, 10**4), st.sampled_from([4, 8, 12, 28]))
def test_bounds_scale_with_constant_and_epsilon(c, n, N):
    base = eq13_bound(1.0, 3, n, N)
    assert eq13_bound(1.0, 3, n, N, BoundConfig(0, c)).value == pytest.approx(c * base.value)
    assert eq21_bound(1.0, n, N, cfg=BoundConfig(0.05, 1)).value >= eq21_bound(1.0, n, N).value


def test_hilbert_symbol_values():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(2, 3, 3) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    assert hilbert_symbol(3, 5, 5) == -1
    with pytest.raises(ValueError):
        hilbert_symbol(0, 1, 3)


@given(nonzero, nonzero)
def test_hilbert_product_formula(a, b):
    primes = set(factorint(2 * abs(a) * abs(b)))
    prod = math.prod(hilbert_symbol(a, b, p) for p in primes)
    at_infinity = -1 if a < 0 and b < 0 else 1
    assert prod * at_infinity == 1
    # every other prime contributes 1
    for p in primerange(3, 40):
        if p not in primes:
            assert hilbert_symbol(a, b, p) == 1


@given(nonzero, nonzero, nonzero, st.sampled_from([2, 3, 5, 7]))
def test_hilbert_symbol_is_bimultiplicative(a, b, c, p):
    assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)
    assert hilbert_symbol(a * c, b, p) == hilbert_symbol(a, b, p) * hilbert_symbol(c, b, p)


@pytest.mark.parametrize("coeffs, want", [([1, 1, 7], {7}), ([1, 1, 3], {3}), ([1, 2, 5], {5}),
                                          ([1, 1, 1], {2})])
def test_anisotropic_primes_examples(coeffs, want):
    assert anisotropic_primes(diagonal_form(coeffs)) == want


@given(ternary)
def test_anisotropic_oracles_agree(form):
    aniso = anisotropic_primes(form, check=True)
    # a positive definite form is anisotropic at infinity, so the number of
    # anisotropic places is even and the finite count is odd
    assert len(aniso) % 2 == 1
    for p in aniso:
        assert is_anisotropic_search(form, p) and is_anisotropic_hilbert(form, p)


@given(st.integers(1, 10**6), st.sampled_from([4, 12, 28, 60, 72]))
def test_arithmetic_profiles(n, N):
    prof = dukeiwaniec_profile(n, N)
    assert prof["t"] * prof["v"] ** 2 * prof["w"] ** 2 == n
    assert math.gcd(prof["w"], N) == 1
    nt = n_tilde(n, N)
    assert n % nt == 0
    assert all(e == 1 for p, e in factorint(nt).items() if N % p == 0)
