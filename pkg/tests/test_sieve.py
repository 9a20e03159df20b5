import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import factorint

from thetanorm.arith import is_squarefree
from thetanorm.sieve import (THREE_SQUARES, Omega_multiplicative, Omega_of_d, SieveConfig,
                             admissible, m_of_zeta, main_term_X, min_omega, min_omega_survey,
                             omega_weight, optimize_m, positive_representations, sieve_identity_check,
                             sieve_report, smooth_search, triples_with_lcm, verify_smooth)
from thetanorm.lattice import count_representations

admissible_n = st.integers(0, 400).map(lambda k: 24 * k + 3).filter(lambda n: n % 5)
squarefree_d = st.integers(1, 42).filter(is_squarefree)


def test_weights_at_small_n():
    assert omega_weight((5, 1, 1), 3) == 1
    assert omega_weight((3, 1, 1), 3) == 0
    assert omega_weight((3, 1, 1), 27) == Fraction(3, 4)
    assert omega_weight((1, 1, 1), 27) == 1
    with pytest.raises(ValueError):
        omega_weight((4, 1, 1), 27)


def test_Omega_table_at_27():
    got = {d: Omega_of_d(d, 27) for d in (1, 2, 3, 5, 6, 7, 15)}
    assert got == {1: 1, 2: 0, 3: Fraction(3, 4), 5: 3, 6: 0, 7: 3, 15: Fraction(9, 4)}
    assert sieve_report(27, dmax=6).to_json()["Omega_table"] == {
        "1": "1", "2": "0", "3": "3/4", "5": "3", "6": "0"}


def test_triples_with_lcm():
    trip = list(triples_with_lcm(6))
    assert all(math.lcm(*t) == 6 for t in trip)
    # (number of divisors)^3 minus the triples that miss 2 or 3
    assert len(trip) == 4 ** 3 - 2 * 2 ** 3 + 1


def test_identity_values():
    assert sieve_identity_check(27, 5) == (24, 24, True)
    assert sieve_identity_check(27, 3) == (8, 8, True)
    with pytest.raises(ValueError):
        sieve_identity_check(29, 3)


@given(st.integers(0, 60).map(lambda k: 8 * k + 3), squarefree_d)
def test_identity_holds(n, d):
    lhs, rhs, ok = sieve_identity_check(n, d)
    assert ok and lhs == rhs
    assert lhs <= count_representations(THREE_SQUARES, n)


@given(admissible_n, squarefree_d)
def test_Omega_is_multiplicative(n, d):
    assert Omega_of_d(d, n) == Omega_multiplicative(d, n)


def test_main_term():
    assert main_term_X(27, 10**4) == pytest.approx(4.0, abs=0.02)
    assert main_term_X(3, 10**4) == pytest.approx(1.0, abs=0.01)


def test_majorant_optimum():
    opt = optimize_m()
    assert opt.m_star == pytest.approx(71.37854, abs=1e-5)
    assert opt.zeta_star == pytest.approx(0.0560831, abs=1e-6)
    assert opt.r_conclusion == 72
    assert abs(opt.grid_m - opt.m_star) < 1e-6


@given(st.floats(1e-4, 6.6))
def test_optimum_is_global(z):
    opt = optimize_m(grid=10**4)
    assert float(m_of_zeta(z, 3 / 58, 6.6408)) >= opt.m_star - 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        SieveConfig(tau=Fraction(3, 2))
    with pytest.raises(ValueError):
        SieveConfig(beta3=0)
    with pytest.raises(ValueError):
        SieveConfig(n=15)
    assert admissible(27) and not admissible(75) and not admissible(11)


def test_min_omega_values():
    assert min_omega(3) == (0, (1, 1, 1))
    assert min_omega(27) == (1, (1, 1, 5))
    assert min_omega(99) == (2, (1, 7, 7))


@given(st.integers(1, 3000).filter(lambda n: n % 8 != 7 and n % 4 != 0))
def test_positive_representations_complete(n):
    reps = positive_representations(n)
    assert all(a <= b <= c and a * a + b * b + c * c == n for a, b, c in reps.tolist())
    # expanding by signs and orderings recovers r_3(n)
    total = 0
    for a, b, c in reps.tolist():
        perms = len({(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)})
        total += perms * 2 ** sum(1 for t in (a, b, c) if t)
    assert total == count_representations(THREE_SQUARES, n)


@given(admissible_n)
def test_min_omega_is_witnessed(n):
    val, x = min_omega(n)
    assert sum(t * t for t in x) == n
    assert val == sum(sum(factorint(t).values()) for t in x)


def test_survey_skips_over_budget():
    out = min_omega_survey(3, 200, budget=1)
    assert all(v == {"skipped": "BudgetExceeded"} for v in out.values())
    out = min_omega_survey(3, 200)
    assert set(out) == {n for n in range(3, 201) if admissible(n)}


def test_smooth_search_plain():
    hits = 0
    for n in range(10**6 + 1, 10**6 + 60, 2):
        if n % 8 == 7:
            continue
        res = smooth_search(n, 0.12, 8)
        assert verify_smooth(res)
        hits += res.found
    assert hits > 0


def test_smooth_search_split():
    res = smooth_search(10**13 + 19, 0.05, 14, variant="split_e")
    assert res.found and res.e == (5, 13, 17)
    assert verify_smooth(res)


def test_smooth_search_reasons():
    assert smooth_search(10**6 + 3, 0.12, 1.0001).reason == "EmptyWindow"
    assert smooth_search(10**6 + 3, 0.12, 8).reason == "NoSolution"
    with pytest.raises(ValueError):
        smooth_search(7, 0.1)
    with pytest.raises(ValueError):
        smooth_search(3, 0.1, variant="other")
