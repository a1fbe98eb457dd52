import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from negkdv.errors import InconsistentInput, RejectedInput
from negkdv.grid import (Grid, GridFunction, antiderivative, derivative, diff_array,
                         fd_weights, integrate)


def periodic(n=128):
    return Grid.periodic(0.0, 2 * np.pi, n)


def test_grid_invariants():
    with pytest.raises(RejectedInput):
        Grid(0.0, 0.1, 4)
    with pytest.raises(RejectedInput):
        Grid(0.0, -0.1, 16)
    g = periodic(64)
    assert g.length == pytest.approx(2 * np.pi)
    assert g.x[-1] < 2 * np.pi
    d = Grid.decaying(-1.0, 1.0, 21)
    assert d.x[-1] == pytest.approx(1.0)


def test_grid_function_is_immutable_and_finite():
    g = periodic(16)
    f = GridFunction(g, np.zeros(16))
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(RejectedInput):
        GridFunction(g, np.full(16, np.nan))
    with pytest.raises(RejectedInput):
        GridFunction(g, np.zeros(15))


def test_fd_weights_reproduce_textbook_stencils():
    assert np.allclose(fd_weights((-1, 0, 1), 1), [-0.5, 0, 0.5])
    assert np.allclose(fd_weights((-1, 0, 1), 2), [1, -2, 1])
    assert np.allclose(fd_weights((-2, -1, 0, 1, 2), 1), np.array([1, -8, 0, 8, -1]) / 12)


@pytest.mark.parametrize("order", [1, 2, 3])
@pytest.mark.parametrize("accuracy", ["second", "fourth"])
def test_derivative_of_constant_is_zero(order, accuracy):
    for g in (periodic(32), Grid.decaying(0, 1, 33)):
        f = GridFunction(g, np.full(g.n, 3.5))
        assert np.max(np.abs(derivative(f, order, accuracy).values)) < 1e-8


def test_bad_order_is_rejected():
    f = periodic(16).sample(np.sin)
    with pytest.raises(RejectedInput):
        derivative(f, 4)
    with pytest.raises(RejectedInput):
        derivative(f, 1, "sixth")


def test_second_derivative_of_sin():
    for n in (64, 128):
        g = periodic(n)
        err = np.max(np.abs(derivative(g.sample(np.sin), 2).values + np.sin(g.x)))
        assert err < 0.1 * g.dx**2 * 1.01


@pytest.mark.parametrize("order,exact", [
    (1, lambda x: -2 * x * np.exp(-x**2)),
    (2, lambda x: (4 * x**2 - 2) * np.exp(-x**2)),
    (3, lambda x: (12 * x - 8 * x**3) * np.exp(-x**2)),
])
@pytest.mark.parametrize("accuracy,p", [("second", 2), ("fourth", 4)])
def test_gaussian_convergence_on_decaying_grid(order, exact, accuracy, p):
    errs = []
    for n in (401, 801, 1601):
        g = Grid.decaying(-8.0, 8.0, n)
        d = derivative(g.sample(lambda x: np.exp(-x**2)), order, accuracy)
        errs.append(np.max(np.abs(d.values - exact(g.x))))
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(2**p, rel=0.2)


def test_gaussian_slope_at_one():
    g = Grid.decaying(-8.0, 8.0, 1601)
    d = derivative(g.sample(lambda x: np.exp(-x**2)), 1, "fourth")
    i = int(np.argmin(np.abs(g.x - 1.0)))
    assert g.x[i] == pytest.approx(1.0)
    assert d.values[i] == pytest.approx(-2 * np.exp(-1.0), abs=1e-8)


@pytest.mark.parametrize("accuracy,p", [("second", 2), ("fourth", 4)])
def test_periodic_convergence_factor(accuracy, p):
    errs = []
    for n in (32, 64, 128):
        g = periodic(n)
        f = g.sample(lambda x: np.exp(np.sin(x)))
        exact = np.cos(g.x) * np.exp(np.sin(g.x))
        errs.append(np.max(np.abs(derivative(f, 1, accuracy).values - exact)))
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(2**p, rel=0.2)


def test_antiderivative_of_zero():
    g = periodic(32)
    assert np.all(antiderivative(GridFunction(g, np.zeros(32)), "zero_mean").values == 0)


def test_zero_mean_antiderivative_of_cos():
    for n in (64, 128):
        g = periodic(n)
        F = antiderivative(g.sample(np.cos), "zero_mean")
        assert np.max(np.abs(F.values - np.sin(g.x))) < 0.1 * g.dx**2


def test_zero_mean_needs_mean_free_input():
    g = periodic(32)
    with pytest.raises(InconsistentInput, match="residual mean"):
        antiderivative(g.sample(lambda x: 1 + np.cos(x)), "zero_mean")


def test_anchored_polynomial():
    for n in (11, 21, 41):
        g = Grid.decaying(0, 1, n)
        F = antiderivative(g.sample(lambda x: 2 * x), "anchored_left")
        assert F.values[0] == 0.0
        # the trapezoid rule is exact for linear integrands
        assert np.max(np.abs(F.values - g.x**2)) < 1e-14


def test_fourth_order_antiderivative():
    errs = {}
    for acc in ("second", "fourth"):
        errs[acc] = []
        for n in (41, 81):
            g = Grid.decaying(0, 2, n)
            F = antiderivative(g.sample(np.exp), "anchored_left", acc)
            errs[acc].append(np.max(np.abs(F.values - (np.exp(g.x) - 1))))
    assert errs["second"][0] / errs["second"][1] == pytest.approx(4, rel=0.1)
    assert errs["fourth"][0] / errs["fourth"][1] == pytest.approx(16, rel=0.2)


def test_integrate():
    g = Grid.decaying(0, 1, 11)
    assert integrate(GridFunction(g, np.ones(11))) == pytest.approx(1.0)
    assert abs(integrate(periodic(64).sample(np.sin))) < 1e-14
    g = Grid.decaying(-20, 20, 4001)
    # oracle: int sech^2 = 2 tanh(20) = 1.9999999999999999830...
    assert integrate(g.sample(lambda x: 1 / np.cosh(x)**2)) == pytest.approx(2.0, abs=1e-4)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6))
def test_periodic_integral_of_derivative_vanishes(coef):
    g = periodic(64)
    x = g.x
    f = sum(a * np.cos((k + 1) * x) + b * np.sin((k + 1) * x)
            for k, (a, b) in enumerate(zip(coef[::2], coef[1::2]))) + 0.3
    for acc in ("second", "fourth"):
        assert abs(integrate(derivative(GridFunction(g, f), 1, acc))) < 1e-12


@pytest.mark.parametrize("accuracy,p", [("second", 2), ("fourth", 4)])
def test_derivative_inverts_antiderivative(accuracy, p):
    errs = []
    for n in (101, 201, 401):
        g = Grid.decaying(0, 3, n)
        f = g.sample(lambda x: np.sin(2 * x) + x**2)
        back = derivative(antiderivative(f, "anchored_left", accuracy), 1, accuracy)
        errs.append(np.max(np.abs(back.values - f.values)[5:-5]))
    assert errs[0] / errs[1] > 2**p * 0.8
    assert errs[1] / errs[2] > 2**p * 0.8


def test_diff_array_matches_gridfunction_path():
    g = periodic(32)
    f = g.sample(np.sin)
    assert np.array_equal(diff_array(f.values, g.dx, 2, "second", True), derivative(f, 2).values)
