from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathfn.core.polys import (
    bernstein_coeffs,
    certify_nonneg,
    poly_compose_affine,
    poly_derivative,
    poly_eval,
    poly_min_exact_quadratic,
    poly_normalize,
    poly_sup_abs,
    solve_linear_system,
)

F = Fraction


def test_poly_eval_and_derivative():
    p = (F(1), F(-2), F(3))  # 1 - 2x + 3x^2
    assert poly_eval(p, F(2)) == 1 - 4 + 12
    assert poly_derivative(p) == (F(-2), F(6))
    assert poly_derivative((F(5),)) == (F(0),)


def test_compose_affine():
    p = (F(0), F(0), F(1))  # x^2
    q = poly_compose_affine(p, F(1), F(-1))  # (1 - s)^2
    assert q == (F(1), F(-2), F(1))
    assert poly_eval(q, F(1, 4)) == F(9, 16)


def test_bernstein_endpoints_are_values():
    p = (F(1), F(2), F(-5), F(3))
    b = bernstein_coeffs(p)
    assert b[0] == poly_eval(p, F(0))
    assert b[-1] == poly_eval(p, F(1))


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=50)


@settings(max_examples=150, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=6))
def test_sup_abs_is_an_upper_bound(cs):
    """Dense sampling can never exceed the certified bound."""
    p = tuple(cs)
    bound = poly_sup_abs(p, F(0), F(1))
    for j in range(0, 65):
        assert abs(poly_eval(p, F(j, 64))) <= bound


def test_sup_abs_exact_for_quadratics():
    # vertex of 1/4 - (x - 1/2)^2 is interior; |p| max is at the endpoints
    p = (F(0), F(1), F(-1))  # x(1-x)
    assert poly_sup_abs(p, F(0), F(1)) == F(1, 4)
    assert poly_sup_abs((F(1), F(-1)), F(0), F(1)) == 1


@settings(max_examples=150, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=6))
def test_certify_nonneg_sound(cs):
    p = tuple(cs)
    verdict = certify_nonneg(p, F(0), F(1))
    if verdict is True:
        assert all(poly_eval(p, F(j, 128)) >= 0 for j in range(129))
    elif verdict is False:
        if len(poly_normalize(p)) <= 3:
            assert poly_min_exact_quadratic(p, F(0), F(1)) < 0
        else:
            # higher-degree refutations come from values at dyadic points
            assert min(poly_eval(p, F(j, 512)) for j in range(513)) < 0
    # None (inconclusive) is always permitted


def test_certify_nonneg_known_cases():
    assert certify_nonneg((F(0), F(0), F(1)), F(0), F(1)) is True  # x^2
    assert certify_nonneg((F(-1), F(1)), F(0), F(1)) is False  # x - 1 < 0 inside
    # quintic with a boundary zero: (1-x)^5
    q = poly_compose_affine((F(0),) * 5 + (F(1),), F(1), F(-1))
    assert certify_nonneg(q, F(0), F(1)) is True


def test_solve_linear_system():
    rows = [[F(2), F(1)], [F(1), F(3)]]
    sol = solve_linear_system(rows, [F(5), F(10)])
    assert sol == (F(1), F(3))
    with pytest.raises(ValueError):
        solve_linear_system([[F(1), F(2)], [F(2), F(4)]], [F(1), F(2)])
