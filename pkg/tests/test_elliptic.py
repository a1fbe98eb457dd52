import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from negkdv.elliptic import (cn, complementary_modulus, complete_K, dn, jacobi,
                             modulus_from_parameter, parameter_from_modulus, sn)
from negkdv.errors import RejectedInput

# 30-digit values from mpmath (ellipfun / ellipk with m = k^2)
SN_08_07 = 0.691468324641427189
CN_08_07 = 0.722406780157535521
DN_08_07 = 0.875052605532154935
K_05 = 1.68575035481259604287
K_0999999 = 7.94747977356234476503


def test_K_limits_and_frozen_values():
    assert complete_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert complete_K(0.5) == pytest.approx(K_05, rel=1e-14)
    assert complete_K(0.999999) == pytest.approx(K_0999999, rel=1e-10)
    with pytest.raises(RejectedInput):
        complete_K(1.0)
    with pytest.raises(RejectedInput):
        complete_K(1.5)


def test_K_against_quadrature_oracle():
    from scipy.integrate import quad

    for k in (0.1, 0.5, 0.9, 0.99, 0.999999):
        ref, _ = quad(lambda t: 1 / math.sqrt(1 - k * k * math.sin(t)**2), 0, math.pi / 2,
                      epsabs=0, epsrel=1e-13, limit=200)
        assert complete_K(k) == pytest.approx(ref, rel=1e-10)


def test_jacobi_at_origin():
    for k in (0.0, 0.3, 0.999, 1.0):
        assert jacobi(0.0, k) == (0.0, 1.0, 1.0)


def test_jacobi_frozen_oracle():
    s, c, d = jacobi(0.8, 0.7)
    assert s == pytest.approx(SN_08_07, abs=1e-12)
    assert c == pytest.approx(CN_08_07, abs=1e-12)
    assert d == pytest.approx(DN_08_07, abs=1e-12)


def test_jacobi_against_inversion_oracle():
    # sn(x) = sin(phi) where F(phi, k) = x; F by quadrature, phi by root finding
    from scipy.integrate import quad
    from scipy.optimize import brentq

    k, x = 0.7, 0.8

    def F(phi):
        return quad(lambda t: 1 / math.sqrt(1 - k * k * math.sin(t)**2), 0, phi,
                    epsabs=0, epsrel=1e-13)[0]

    phi = brentq(lambda p: F(p) - x, 0, math.pi / 2, xtol=1e-15)
    s, c, d = jacobi(x, k)
    assert s == pytest.approx(math.sin(phi), abs=1e-10)
    assert c == pytest.approx(math.cos(phi), abs=1e-10)
    assert d == pytest.approx(math.sqrt(1 - k * k * math.sin(phi)**2), abs=1e-10)


def test_degenerate_limits():
    x = np.linspace(-20, 20, 401)
    s, c, d = jacobi(x, 0.0)
    assert np.max(np.abs(s - np.sin(x))) < 1e-12
    assert np.max(np.abs(c - np.cos(x))) < 1e-12
    assert np.all(d == 1.0)
    s, c, d = jacobi(x, 1.0)
    assert np.max(np.abs(s - np.tanh(x))) < 1e-12
    assert np.max(np.abs(c - 1 / np.cosh(x))) < 1e-12
    assert np.max(np.abs(d - 1 / np.cosh(x))) < 1e-12


def test_matches_scipy_reference():
    from scipy.special import ellipj

    x = np.linspace(-50, 50, 2001)
    for k in (0.05, 0.5, 0.9, 0.99, 0.999):
        ref = ellipj(x, k * k)[:3]
        for got, want in zip(jacobi(x, k), ref):
            assert np.max(np.abs(got - want)) < 1e-12


def test_scalar_helpers_agree():
    assert sn(0.8, 0.7) == jacobi(0.8, 0.7)[0]
    assert cn(0.8, 0.7) == jacobi(0.8, 0.7)[1]
    assert dn(0.8, 0.7) == jacobi(0.8, 0.7)[2]


def test_conversions():
    assert parameter_from_modulus(0.5) == 0.25
    assert modulus_from_parameter(0.25) == 0.5
    assert complementary_modulus(0.6) == pytest.approx(0.8)
    with pytest.raises(RejectedInput):
        modulus_from_parameter(-0.1)


def test_non_finite_input_rejected():
    with pytest.raises(RejectedInput):
        jacobi(float("nan"), 0.5)
    with pytest.raises(RejectedInput):
        jacobi(0.1, -0.2)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(0, 1))
def test_pythagorean_identities(x, k):
    s, c, d = jacobi(x, k)
    assert abs(s * s + c * c - 1) <= 1e-12
    assert abs(d * d - (1 - k * k * s * s)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.floats(0, 0.99))
def test_periodicity(x, k):
    K = complete_K(k)
    assert abs(sn(x + 4 * K, k) - sn(x, k)) <= 1e-10
    assert abs(cn(x + 4 * K, k) - cn(x, k)) <= 1e-10
    assert abs(dn(x + 2 * K, k) - dn(x, k)) <= 1e-10


@pytest.mark.parametrize("k", [0.3, 0.8, 0.99])
def test_derivative_identities_converge_at_second_order(k):
    x = np.linspace(-5, 5, 41)
    errs = []
    for h in (1e-2, 5e-3):
        s, c, d = jacobi(x, k)
        sp, cp, dp = jacobi(x + h, k)
        sm, cm, dm = jacobi(x - h, k)
        e = max(np.max(np.abs((sp - sm) / (2 * h) - c * d)),
                np.max(np.abs((cp - cm) / (2 * h) + s * d)),
                np.max(np.abs((dp - dm) / (2 * h) + k * k * s * c)))
        errs.append(e)
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.05)
