import random

import pytest
from hypothesis import given, strategies as st
from sympy import divisor_sigma

from thetanorm.errors import BudgetExceeded
from thetanorm.forms import diagonal_form, scramble, validate_form
from thetanorm.lattice import (brute_force_counts, count_representations, find_representation,
                               representations_list, theta_coefficients)

from conftest import small_form

forms = st.builds(small_form, st.integers(0, 10**6), st.sampled_from([2, 3, 4]), st.booleans())

# sums of three squares, n = 1..10
R3 = [6, 12, 8, 6, 24, 24, 0, 12, 30, 24]


def jacobi_r4(n: int) -> int:
    odd = n
    while odd % 2 == 0:
        odd //= 2
    return 8 * int(divisor_sigma(n)) if n % 2 else 24 * int(divisor_sigma(odd))


def test_three_squares_known_counts(three_squares):
    assert [count_representations(three_squares, n) for n in range(1, 11)] == R3
    assert theta_coefficients(three_squares, 10).r == R3


def test_four_squares_jacobi(four_squares):
    th = theta_coefficients(four_squares, 300)
    assert all(th[n] == jacobi_r4(n) for n in range(1, 301))
    assert th[0] == 1


def test_dense_path_matches_diagonal_path():
    # the same lattice given by a non-diagonal Gram matrix takes the enumeration path
    form = diagonal_form([1, 2, 3])
    other, _ = scramble(form, random.Random(3))
    assert not other.is_diagonal()
    assert theta_coefficients(other, 200).r == theta_coefficients(form, 200).r


def test_representations_are_solutions():
    form = validate_form([[2, 1, 0], [1, 4, 1], [0, 1, 6]])
    reps = representations_list(form, 12)
    assert len(reps) == count_representations(form, 12) == len(set(reps))
    assert all(form.q(x) == 12 for x in reps)
    x = find_representation(form, 12)
    assert x is not None and form.q(x) == 12
    assert find_representation(diagonal_form([1, 1, 1]), 7) is None


def test_budget_exhaustion():
    with pytest.raises(BudgetExceeded):
        count_representations(diagonal_form([1, 1, 1, 1, 1]), 10**4, budget=100)


def test_edge_values(three_squares):
    assert count_representations(three_squares, 0) == 1
    assert count_representations(three_squares, -1) == 0
    with pytest.raises(ValueError):
        theta_coefficients(three_squares, 0)


small_dim = st.builds(small_form, st.integers(0, 10**6), st.sampled_from([2, 3]), st.booleans())


@given(small_dim)
def test_theta_matches_box_scan(form):
    # the scan box grows fast with the dimension, so the oracle stays in m <= 3
    X = 30
    assert theta_coefficients(form, X).r == brute_force_counts(form, X)


@given(forms, st.integers(0, 10**6))
def test_theta_is_class_invariant(form, seed):
    other, _ = scramble(form, random.Random(seed))
    assert theta_coefficients(other, 60).r == theta_coefficients(form, 60).r


@given(forms, st.integers(1, 60))
def test_counts_are_even(form, n):
    # x and -x pair up
    assert count_representations(form, n) % 2 == 0
