import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gd_mp, jacobi_mp, terminating_series
from susypt.complex_special import Grid, GridFunction, gudermannian, jacobi_poly, jacobi_series, log_cosh
from susypt.errors import DegenerateRecurrenceError, GridError


def test_degree_zero_is_one():
    assert jacobi_poly(0, 0.3 + 2j, -1.1, 5j) == 1


def test_degree_one_closed_form():
    assert jacobi_poly(1, 2, 1, 0.5) == pytest.approx(1.75, abs=1e-15)


def test_complex_indices_match_series():
    a, b, z = 0.5 + 1j, -0.5 - 1j, 0.7j
    ref = terminating_series(3, a, b, z)
    assert abs(jacobi_poly(3, a, b, z) - ref) <= 1e-12 * abs(ref)


def test_matches_mpmath_for_low_degrees():
    rng = np.random.default_rng(1)
    for n in range(11):
        a, b = rng.uniform(-0.8, 3, 2)
        z = complex(*rng.uniform(-1.5, 1.5, 2))
        ref = jacobi_mp(n, a, b, z)
        assert abs(jacobi_poly(n, a, b, z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_random_real_draws_against_series():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(0, 9))
        a, b = rng.uniform(-0.9, 4, 2)
        z = rng.uniform(-2, 2)
        ref = terminating_series(n, a, b, z)
        assert abs(jacobi_poly(n, a, b, z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_internal_series_agrees_with_mpmath_series():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(0, 11))
        a, b, z = rng.normal(size=3) + 1j * rng.normal(size=3)
        ref = terminating_series(n, a, b, z)
        assert abs(jacobi_series(n, a, b, z) - ref) <= 1e-11 * max(1.0, abs(ref))


complex_st = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 6), a=complex_st, b=complex_st, z=complex_st)
def test_reflection_symmetry(n, a, b, z):
    try:
        lhs = jacobi_poly(n, a, b, -z)
        rhs = (-1) ** n * jacobi_poly(n, b, a, z)
    except DegenerateRecurrenceError:
        return
    scale = max(1.0, abs(rhs), abs(jacobi_series(n, b, a, z)))
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_degenerate_recurrence_is_reported_and_series_survives():
    # k + a + b = 0 at k = 2
    with pytest.raises(DegenerateRecurrenceError, match="degenerate Jacobi recurrence"):
        jacobi_poly(3, -1.0, -1.0, 0.3)
    assert np.isfinite(jacobi_series(3, -1.0, -1.0, 0.3))


def test_array_argument():
    z = np.linspace(-1, 1, 7)
    out = jacobi_poly(4, 0.2, 1.3, z)
    assert out.shape == z.shape
    assert np.allclose(out, [jacobi_poly(4, 0.2, 1.3, zi) for zi in z], rtol=1e-14)


@pytest.mark.parametrize("bad", [-1, 1.5])
def test_bad_degree(bad):
    with pytest.raises(ValueError):
        jacobi_poly(bad, 0, 0, 0.1)


def test_gudermannian_values():
    assert gudermannian(0.0) == 0.0
    assert gudermannian(50.0) == pytest.approx(math.pi / 2, abs=1e-12)
    assert gudermannian(1.0) == pytest.approx(gd_mp(1.0), abs=1e-12)
    assert gudermannian(1.0) == pytest.approx(0.865769483239659, abs=1e-12)


def test_gudermannian_matches_mpmath_and_is_odd():
    x = np.random.default_rng(0).uniform(-40, 40, 500)
    g = gudermannian(x)
    assert np.array_equal(gudermannian(-x), -g)
    assert np.max(np.abs(g - [gd_mp(v) for v in x])) < 1e-14


def test_gudermannian_no_overflow():
    with np.errstate(all="raise"):
        assert gudermannian(1e6) == pytest.approx(math.pi / 2)


def test_log_cosh_large_argument():
    assert log_cosh(800.0) == pytest.approx(800.0 - math.log(2.0))
    assert log_cosh(0.0) == 0.0


def test_grid_validation_and_symmetry():
    with pytest.raises(GridError):
        Grid(0, 1, 2)
    with pytest.raises(GridError):
        Grid(1, 0, 10)
    with pytest.raises(GridError):
        Grid.symmetric(5, 10)
    g = Grid.symmetric(14, 701)
    assert g.is_symmetric and g.h == pytest.approx(0.04)
    x = g.nodes
    assert np.array_equal(x, -x[::-1]) and x[350] == 0.0
    assert not Grid(0, 1, 11).is_symmetric


def test_grid_function_shape_and_scaling():
    g = Grid(0, 1, 5)
    with pytest.raises(GridError):
        GridFunction(g, np.zeros(4))
    f = GridFunction(g, [1, -4j, 2, 0, 1]).scaled()
    assert np.max(np.abs(f.values)) == 1.0 and f.values[1] == -1j
    with pytest.raises(GridError):
        GridFunction(g, np.zeros(5)).scaled()
