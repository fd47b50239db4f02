import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tarch.conditions import (
    alpha_max,
    alpha_max_curve,
    bound_term,
    classify_point,
    gaussian_breakpoint,
    m0,
    moment_lower_bound,
    necessary_condition,
    nelson_bound,
    region_grid,
    simple_condition,
    table_rows,
)
from tarch.dist import Laplace, PointMass, StudentT, gaussian
from tarch.errors import DomainError, MomentDivergentError, TruncationWarning
from tarch.model import ModelParams

SECOND_BOUNDARIES = [3, 6.455, 12.652, 23.714, 43.297, 77.694, 137.715]
SECOND_ALPHA = [1, 1.291, 1.807, 2.635, 3.936, 5.976, 9.181]
FOURTH_BOUNDARIES = [3.416, 4.579, 6.373, 8.846, 12.183, 16.656, 22.626, 30.571, 41.122]
FOURTH_ALPHA = [0.577, 0.612, 0.684, 0.787, 0.923, 1.098, 1.320, 1.599, 1.948]


def mu(m):
    return math.prod(range(1, 2 * m, 2))


def brute_bound(p, k, m):
    # straight transcription, exact integer moments, no logs
    if k == 0 and m > 1:
        return 0.0
    den = mu(p) * mu(m) ** (1 - 1 / m) * mu(m * p) ** (1 / m)
    return (k ** (m - 1) / den) ** (1 / (2 * p + m - 1))


def test_bound_term_examples():
    assert bound_term(gaussian, 1, 17.0, 1) == pytest.approx(1.0, abs=1e-15)
    assert bound_term(gaussian, 1, 6.455, 2) == pytest.approx(1.291, abs=1e-3)
    assert bound_term(gaussian, 2, 0.0, 1) == pytest.approx(0.577, abs=1e-3)
    assert bound_term(gaussian, 2, 0.0, 3) == 0.0


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("k", [0.0, 0.7, 3.0, 25.0])
def test_bound_term_matches_transcription(p, m, k):
    assert bound_term(gaussian, p, k, m) == pytest.approx(brute_bound(p, k, m), rel=1e-12)


def test_alpha_max_examples():
    r = alpha_max(gaussian, 1, 4.0)
    assert r.m_star == 2 and r.alpha_max == pytest.approx((4 / 3) ** (1 / 3), rel=1e-12)
    assert r.alpha_max == pytest.approx(1.101, abs=1e-3)
    assert alpha_max(gaussian, 1, 13.0).m_star == 4
    r = alpha_max(gaussian, 2, 4.0)
    oracle = (4.0 / (3**1.5 * 105**0.5)) ** (1 / 5)
    assert r.m_star == 2 and r.alpha_max == pytest.approx(oracle, rel=1e-12)
    assert 0.577 < r.alpha_max < 0.612
    assert len(r.terms) == 64 and r.terms[0][0] == 1


def test_alpha_max_truncation_warning():
    with pytest.warns(TruncationWarning):
        r = alpha_max(gaussian, 1, 50.0, m_cap=3)
    assert r.truncated and r.m_star == 3
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not alpha_max(gaussian, 1, 50.0).truncated


def test_breakpoints_and_m0():
    assert gaussian_breakpoint(2) == 3.0
    assert gaussian_breakpoint(3) == pytest.approx(6.455, abs=1e-3)
    assert gaussian_breakpoint(5) == pytest.approx(23.714, abs=1e-3)
    for m, b in zip(range(2, 9), SECOND_BOUNDARIES):
        assert gaussian_breakpoint(m) == pytest.approx(b, abs=1e-3)
    assert [m0(1.0), m0(10.0), m0(50.0)] == [1, 3, 6]
    with pytest.raises(DomainError):
        gaussian_breakpoint(1)


def test_m0_agrees_with_search():
    ks = np.random.default_rng(1).uniform(0, 137, 200)
    for k in ks:
        terms = [brute_bound(1, k, m) for m in range(1, 51)]
        assert m0(k) == int(np.argmax(terms)) + 1 == alpha_max(gaussian, 1, k, 50).m_star


def test_simple_and_necessary_conditions():
    assert simple_condition(gaussian, 2, 0.5)
    assert not simple_condition(gaussian, 1, 1.0)
    assert not simple_condition(gaussian, 2, 0.577350269189626)
    assert simple_condition(gaussian, 2, 0.5773)
    for a in (0.1, 1.0, 50.0):
        assert necessary_condition(gaussian, 1, a, 1.0)
    assert not necessary_condition(gaussian, 1, 1.5, 0.0)
    assert necessary_condition(gaussian, 2, 0.5, 0.5)
    with pytest.raises(DomainError):
        necessary_condition(gaussian, 1, 0.5, 1.5)


def test_moment_lower_bound():
    assert moment_lower_bound(gaussian, ModelParams(1, 0.9, 0.5), 1) == pytest.approx(
        1 / (1 - 0.45), abs=1e-12
    )
    assert moment_lower_bound(gaussian, ModelParams(1, 3.0, 1.0), 1) == 1.0
    assert moment_lower_bound(gaussian, ModelParams(1, 0.5, 0.0), 1) == 2.0
    assert moment_lower_bound(gaussian, ModelParams(2, 0.2, 0.3), 2) == pytest.approx(
        3 * 4 / (1 - 3 * 0.04 * (1 - 0.09))
    )
    with pytest.raises(DomainError):
        moment_lower_bound(gaussian, ModelParams(1, 0.5, 2.0), 1)
    with pytest.raises(MomentDivergentError):
        moment_lower_bound(gaussian, ModelParams(1, 1.5, 0.0), 1)


def test_nelson_bound():
    assert nelson_bound(gaussian) == pytest.approx(3.562, abs=5e-3)
    assert nelson_bound(PointMass()) == 1.0
    assert not simple_condition(gaussian, 1, 1.0) and 1.0 < nelson_bound(gaussian)


def test_classify_point_examples():
    r = classify_point(gaussian, 1.1, 5.0)
    assert r.strict and r.second_moment
    r = classify_point(gaussian, 0.5, 0.0)
    assert r.strict and r.second_moment and r.fourth_moment
    r = classify_point(gaussian, 2.0, 1.0)
    assert (r.strict, r.second_moment, r.fourth_moment) == (True, False, False)
    assert classify_point(gaussian, 2.0, 0.0).strict
    assert not classify_point(gaussian, 3.6, 0.0).strict


def test_second_moment_table():
    rows = table_rows(gaussian, 1, 140.0)
    assert [r.m for r in rows] == list(range(1, 9))
    for r, b, a in zip(rows, SECOND_BOUNDARIES, SECOND_ALPHA):
        assert r.k_hi == pytest.approx(b, abs=1e-3)
        assert r.alpha_max == pytest.approx(a, abs=1e-3)
    assert rows[0].k_lo == 0.0 and rows[-1].k_hi == 140.0


def test_fourth_moment_table():
    rows = table_rows(gaussian, 2, 42.0)
    for r, b, a in zip(rows, FOURTH_BOUNDARIES, FOURTH_ALPHA):
        assert r.k_hi == pytest.approx(b, abs=1e-3)
        assert r.alpha_max == pytest.approx(a, abs=1e-3)


def test_table_single_row():
    rows = table_rows(gaussian, 1, 2.0)
    assert len(rows) == 1
    assert (rows[0].k_lo, rows[0].k_hi, rows[0].m) == (0.0, 2.0, 1)
    assert rows[0].alpha_max == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5])
def test_single_term_equals_simple_condition(p):
    for k in (0.0, 1.0, 7.5):
        assert bound_term(gaussian, p, k, 1) == pytest.approx(mu(p) ** (-1 / p), rel=1e-12)
    assert alpha_max(gaussian, p, 0.0).alpha_max == pytest.approx(mu(p) ** (-1 / p), rel=1e-12)


@pytest.mark.parametrize("p,k_max", [(1, 140.0), (2, 42.0), (3, 40.0)])
def test_breakpoint_continuity(p, k_max):
    rows = table_rows(gaussian, p, k_max)
    for left, right in zip(rows[:-1], rows[1:]):
        k = left.k_hi
        a = bound_term(gaussian, p, k, left.m)
        b = bound_term(gaussian, p, k, right.m)
        assert abs(a - b) <= 1e-9


def test_monotone_in_k_and_order():
    ks = np.linspace(0, 140, 2001)
    a1, _ = alpha_max_curve(gaussian, 1, ks)
    a2, _ = alpha_max_curve(gaussian, 2, ks)
    assert np.all(np.diff(a1) >= 0) and np.all(np.diff(a2) >= 0)
    assert np.all(a2 <= a1)


@settings(max_examples=100, deadline=None)
@given(k=st.floats(0.0, 1.0), u=st.floats(0.0, 1.0), p=st.sampled_from([1, 2, 3]))
def test_sufficient_region_inside_necessary(k, u, p):
    amax = alpha_max(gaussian, p, k).alpha_max
    alpha = u * amax * (1 - 1e-12)
    assert necessary_condition(gaussian, p, alpha, k)


def test_region_grid_matches_pointwise_and_nests():
    alphas = np.linspace(0, 6, 13)
    ks = np.linspace(0, 30, 7)
    rows = region_grid(gaussian, alphas, ks)
    assert [(r.k, r.alpha) for r in rows] == [(k, a) for k in ks for a in alphas]
    for r in rows:
        assert r == classify_point(gaussian, r.alpha, r.k)
        assert r.second_moment or not r.fourth_moment
        assert r.strict or not r.second_moment


def test_other_innovations():
    r = alpha_max(Laplace(), 1, 5.0)
    assert r.alpha_max >= 1.0
    # m = 1 for p = 2 under Laplace: mu_4 = 6
    assert bound_term(Laplace(), 2, 0.0, 1) == pytest.approx(6 ** -0.5, rel=1e-12)
    t = StudentT(5.0)
    r = alpha_max(t, 1, 10.0, m_cap=8)  # only m = 1, 2 have finite moments
    assert r.m_star in (1, 2) and all(b == 0.0 for m, b in r.terms if m >= 3)
    with pytest.raises(MomentDivergentError):
        bound_term(t, 1, 10.0, 3)
