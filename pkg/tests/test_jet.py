import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial import Polynomial
from hypothesis import given, settings, strategies as st

from tdho.errors import CompositionDomainError
from tdho.jet import Jet


def test_square_first_derivative():
    mu = Jet.variable(0, (2,))
    j = mu * mu
    assert j.coeff((1,)) == 2.0
    assert j.derivative((2,)) == 2.0


def test_exp_of_zero_and_inv_sqrt_of_four():
    assert Jet.constant(0.0, (3, 2)).exp().c == pytest.approx(Jet.constant(1.0, (3, 2)).c)
    assert Jet.constant(4.0, (2,)).inv_sqrt().c == pytest.approx(Jet.constant(0.5, (2,)).c)


def test_inv_sqrt_taylor_coefficients():
    # (1 + 3 d)^(-1/2) about d = 0, coefficients from the binomial series
    x = Jet.variable(0, (5,)) * 3.0 - 2.0
    got = x.inv_sqrt().c
    ref = [math.comb(2 * k, k) * (-1) ** k / 4**k * 3**k for k in range(6)]
    assert got == pytest.approx(ref, rel=1e-14)


def test_exp_matches_product_of_univariate_series():
    a, b = Jet.variable(0, (4, 3)), Jet.variable(1, (4, 3))
    f = (a * 0.5 + b * (-1.2)).exp()
    ea = np.array([math.exp(0.5) * 0.5**k / math.factorial(k) for k in range(5)])
    eb = np.array([math.exp(-1.2) * (-1.2) ** k / math.factorial(k) for k in range(4)])
    assert f.c == pytest.approx(np.outer(ea, eb), rel=1e-13)


def test_compose_agrees_with_recurrence():
    a, b = Jet.variable(0, (3, 3)), Jet.variable(1, (3, 3))
    g = a * a * b + b * 0.3
    taylor = [math.exp(1.3) / math.factorial(k) for k in range(8)]
    assert g.compose(taylor).c == pytest.approx(g.exp().c, rel=1e-12)


def test_reciprocal_and_division():
    a = Jet.variable(0, (4,)) * 2.0 + 1.0
    one = a * a.reciprocal()
    assert one.c == pytest.approx(Jet.constant(1.0, (4,)).c, abs=1e-14)
    assert (a / a).c == pytest.approx(one.c, abs=1e-14)


def test_batched_coefficients_broadcast():
    x = np.array([0.0, 1.0, -2.0])
    mu = Jet.variable(0, (3,))
    f = (mu * x).exp()
    for i, xi in enumerate(x):
        g = (mu * xi).exp()
        assert f.c[:, i] == pytest.approx(g.c, rel=1e-14)
    assert f.batch_shape == (3,)


def test_exact_mode():
    mu = Jet.variable(0, (4,), exact=True)
    h = (mu * mu).power(Fraction(-1, 2))
    assert h.exact
    assert list(h.c) == [Fraction(1), Fraction(-1), Fraction(1), Fraction(-1), Fraction(1)]
    e = (mu - 1).exp()
    assert list(e.c) == [Fraction(1, math.factorial(k)) for k in range(5)]


def test_domain_errors():
    with pytest.raises(CompositionDomainError):
        Jet.constant(0.0, (2,)).inv_sqrt()
    with pytest.raises(CompositionDomainError):
        Jet.constant(-1.0, (2,)).power(0.5)
    with pytest.raises(CompositionDomainError):
        Jet.variable(0, (2,), exact=True).exp()


def test_order_mismatch():
    with pytest.raises(ValueError):
        Jet.variable(0, (2,)) + Jet.variable(0, (3,))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-1, 1), st.floats(-1, 1), st.floats(-0.9, 0.9))
def test_power_matches_finite_taylor(c0, c1, c2, alpha):
    # univariate polynomial p(mu) about mu = 1, compare against direct derivatives
    d = Jet.variable(0, (3,)) - 1.0
    p = d * d * c2 + d * c1 + c0
    got = p.power(alpha).c
    poly = Polynomial([c0, c1, c2])
    h = 1e-3
    # central-difference first derivative as a loose independent check
    fd = ((poly(h)) ** alpha - (poly(-h)) ** alpha) / (2 * h)
    assert got[0] == pytest.approx(c0**alpha, rel=1e-13)
    assert got[1] == pytest.approx(fd, rel=1e-4, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6), st.lists(st.floats(-2, 2), min_size=6, max_size=6))
def test_product_matches_polynomial_multiplication(a, b):
    ja, jb = Jet(np.array(a).reshape(2, 3)), Jet(np.array(b).reshape(2, 3))
    full = np.zeros((3, 5))
    for (i, j), va in np.ndenumerate(ja.c):
        for (k, l), vb in np.ndenumerate(jb.c):
            full[i + k, j + l] += va * vb
    assert (ja * jb).c == pytest.approx(full[:2, :3], abs=1e-12)
