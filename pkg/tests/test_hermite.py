import math

import numpy as np
import pytest

from fbmvar import hermite
from fbmvar.rng import stream


def hermite_via_integer_coefficients(q, x):
    """Oracle: exact integer coefficients of He_q via He_{n+1} = x He_n - n He_{n-1},
    then divide by q! (independent of the evaluator's normalised recurrence)."""
    prev, cur = [1], [0, 1]  # He_0, He_1 coefficient lists
    if q == 0:
        cur = prev
    for n in range(1, q):
        shifted = [0] + cur
        nxt = [a - n * b for a, b in zip(shifted, prev + [0] * (len(shifted) - len(prev)))]
        prev, cur = cur, nxt
    acc = 0.0
    for k, c in enumerate(cur[: q + 1]):
        acc += c * x**k
    return acc / math.factorial(q)


def test_low_degree_values():
    assert hermite.hermite_eval(0, 3.7) == 1.0
    assert hermite.hermite_eval(1, -2.5) == -2.5
    assert hermite.hermite_eval(2, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert hermite.hermite_eval(3, 2.0) == pytest.approx(1.0 / 3.0, rel=1e-15)


@pytest.mark.parametrize("q", range(0, 11))
def test_matches_coefficient_oracle(q):
    # the upward recurrence must stay stable over the documented range
    # q <= 10, |x| <= 40
    for x in (-40.0, -3.2, -1.0, 0.0, 0.7, 2.5, 4.0, 40.0):
        assert hermite.hermite_eval(q, x) == pytest.approx(
            hermite_via_integer_coefficients(q, x), rel=1e-11, abs=1e-12
        )


def test_vectorised_evaluation():
    x = np.linspace(-2, 2, 7)
    out = hermite.hermite_eval(2, x)
    assert out.shape == x.shape
    assert np.allclose(out, (x**2 - 1) / 2)


def test_gaussian_moments():
    assert hermite.gaussian_moment(1) == 0.0
    assert hermite.gaussian_moment(2) == 1.0
    assert hermite.gaussian_moment(6) == 15.0
    # quadrature oracle
    nodes, weights = np.polynomial.hermite_e.hermegauss(60)
    w = weights / math.sqrt(2 * math.pi)
    for q in range(0, 11):
        assert hermite.gaussian_moment(q) == pytest.approx(
            float(np.sum(w * nodes**q)), abs=1e-8
        )


def test_monomial_table():
    assert hermite.monomial_in_hermite(2).as_dict() == {2: 2, 0: 1}
    assert hermite.monomial_in_hermite(3).as_dict() == {3: 6, 1: 3}
    assert hermite.monomial_in_hermite(4).as_dict() == {4: 24, 2: 12, 0: 3}
    assert hermite.monomial_in_hermite(5).as_dict() == {5: 120, 3: 60, 1: 15}


def test_monomial_structure():
    for m in range(1, 11):
        coeffs = hermite.monomial_in_hermite(m)
        assert coeffs.coeffs[m] == math.factorial(m)  # leading coefficient
        assert coeffs.coeffs[0] == hermite.gaussian_moment(m)  # centering
        for p, c in enumerate(coeffs.coeffs):
            if (m - p) % 2 == 1:
                assert c == 0


def test_monomial_reconstruction():
    rng = stream(2718, 0)
    xs = rng.uniform(-3.0, 3.0, 100)
    for m in range(1, 7):
        rebuilt = hermite.monomial_in_hermite(m).evaluate(xs)
        assert np.allclose(rebuilt, xs**m, rtol=1e-10, atol=1e-12)


def test_orthogonality_quadrature():
    # E[H_p(X) H_q(X)] = 1{p=q}/q! exactly (c = 1), by Gauss-Hermite quadrature
    nodes, weights = np.polynomial.hermite_e.hermegauss(40)
    w = weights / math.sqrt(2 * math.pi)
    for p in range(0, 7):
        hp = hermite.hermite_eval(p, nodes)
        for q in range(0, 7):
            hq = hermite.hermite_eval(q, nodes)
            val = float(np.sum(w * hp * hq))
            target = 1.0 / math.factorial(q) if p == q else 0.0
            assert val == pytest.approx(target, abs=1e-10)


@pytest.mark.parametrize("p,q,c", [(2, 2, 0.5), (3, 2, 0.5), (3, 3, -0.3)])
def test_orthogonality_monte_carlo(p, q, c):
    rng = stream(314, 0)
    z1 = rng.standard_normal(200_000)
    z2 = rng.standard_normal(200_000)
    x = z1
    y = c * z1 + math.sqrt(1 - c * c) * z2
    prod = hermite.hermite_eval(p, x) * hermite.hermite_eval(q, y)
    target = c**q / math.factorial(q) if p == q else 0.0
    se = prod.std() / math.sqrt(len(prod))
    assert abs(prod.mean() - target) < 3 * se
