import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from thetanorm.errors import NotPositiveDefinite, NotSymmetric, OddDiagonal
from thetanorm.forms import (check_reduced, congruent, det_int, diagonal_form, dual_form,
                             inverse_frac, level, level_by_scan, load_form, minimum, scramble,
                             siegel_reduce, validate_form)

from conftest import small_form

forms = st.builds(small_form, st.integers(0, 10**6), st.sampled_from([2, 3, 4]), st.booleans())


@pytest.mark.parametrize("raw, exc", [
    ([[2, 1], [0, 2]], NotSymmetric),
    ([[3, 0], [0, 2]], OddDiagonal),
    ([[2, 3], [3, 2]], NotPositiveDefinite),
    ([[2, 0], [0, 0]], NotPositiveDefinite),
])
def test_validation_rejects(raw, exc):
    with pytest.raises(exc):
        validate_form(raw)


@pytest.mark.parametrize("coeffs, N, det", [
    ([1, 1, 1], 4, 8), ([1, 3], 12, 12), ([1, 1, 1, 1], 4, 16),
    ([1, 2, 3], 24, 48), ([1, 1, 7], 28, 56), ([2, 3], 24, 24),
])
def test_level_and_det_of_diagonal_forms(coeffs, N, det):
    form = diagonal_form(coeffs)
    assert form.level == N
    assert form.det == det


def test_hexagonal_lattice():
    a2 = validate_form([[2, 1], [1, 2]])
    assert (a2.level, a2.det) == (3, 3)
    assert a2.q([1, -1]) == 1


def test_q_is_half_xtgx():
    form = validate_form([[4, 1, 0], [1, 2, 1], [0, 1, 6]])
    x = [1, -2, 3]
    g = form.gram
    assert 2 * form.q(x) == sum(x[i] * g[i][j] * x[j] for i in range(3) for j in range(3))


def test_dual_of_three_squares():
    dual = dual_form(diagonal_form([1, 1, 1]))
    assert dual.gram == ((2, 0, 0), (0, 2, 0), (0, 0, 2))
    assert minimum(dual) == 1


def test_load_form_roundtrip(tmp_path):
    form = validate_form([[2, 1], [1, 4]], name="x")
    path = tmp_path / "f.json"
    import json

    path.write_text(json.dumps(form.to_json()))
    assert load_form(path) == form
    path.write_text(json.dumps({"diag_q": [1, 2, 3]}))
    assert load_form(path) == diagonal_form([1, 2, 3])


def test_siegel_reduce_binary():
    red = siegel_reduce(validate_form([[2, 1], [1, 10]]))
    assert red.gram == ((2, -1), (-1, 10))
    assert red.a == (Fraction(2), Fraction(19, 2))


@given(forms)
def test_level_matches_scan(form):
    assert level(form) == form.level == level_by_scan(form)


@given(forms, st.integers(0, 10**6))
def test_scramble_preserves_invariants(form, seed):
    other, U = scramble(form, random.Random(seed))
    assert abs(det_int(U)) == 1
    assert validate_form(congruent(form.gram, U)) == other
    assert (other.det, other.level, other.primitive) == (form.det, form.level, form.primitive)
    assert minimum(other) == minimum(form)


@given(forms)
def test_reduction_is_congruent_and_reduced(form):
    red = siegel_reduce(form)
    assert abs(det_int(red.U)) == 1
    assert validate_form(congruent(form.gram, red.U)).gram == tuple(map(tuple, red.gram))
    check_reduced(red)
    # b1 is a lattice vector, and Siegel's condition keeps it within (4/3)^(m-1) of the minimum
    assert 2 * minimum(form) <= red.a[0] <= Fraction(4, 3) ** (form.m - 1) * 2 * minimum(form)


@given(forms)
def test_inverse_frac(form):
    inv = inverse_frac(form.gram)
    m = form.m
    for i in range(m):
        for j in range(m):
            assert sum(form.gram[i][k] * inv[k][j] for k in range(m)) == (1 if i == j else 0)
