import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import strategies as S
from foliate import I, QI, Poly, Scalar, fiber_mean, is_zero, partial_derivative
from foliate.coeffs import format_poly
from foliate.scalar import format_scalar

ALPHA = Poly.param("alpha")
NAMES = ("x", "y", "z")


def sample(s, point, values=None):
    return s.evaluate(point, values)


def points(n, count=6, seed=0):
    rng = random.Random(seed)
    return [[rng.uniform(0, 2 * math.pi) for _ in range(n)] for _ in range(count)]


# --- coefficients ------------------------------------------------------------

@given(S.qis, S.qis, S.qis)
def test_qi_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == QI(1)


def test_qi_normal_form():
    assert QI(Fraction(2, 4), Fraction(-3, 6)) == QI(Fraction(1, 2), Fraction(-1, 2))
    assert I * I == QI(-1)
    assert hash(QI(Fraction(1, 2))) == hash(QI(Fraction(2, 4)))


@given(S.polys(), S.polys(), S.polys())
def test_poly_ring_laws(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert p * q == q * p
    assert (p - p).is_zero()


def test_exp_atoms_multiply_additively():
    a = Poly.exp(ALPHA * I)
    b = Poly.exp(ALPHA * I * 2)
    assert a * a == b
    assert a * Poly.exp(-ALPHA * I) == Poly.const(1)
    # exp-atoms are independent of plain monomials
    assert not (a - ALPHA).is_zero()


def test_poly_evaluate_oracle():
    p = (ALPHA * 3 + 1) * Poly.exp(ALPHA * I)
    v = 0.37
    assert cmath.isclose(p.evaluate({"alpha": v}), (3 * v + 1) * cmath.exp(1j * v))


def test_poly_exact_division():
    p = (ALPHA + 1) * (ALPHA - 2)
    assert p.exact_div(ALPHA + 1) == ALPHA - 2
    with pytest.raises(ArithmeticError):
        Poly.const(1).exact_div(ALPHA + 1)


def test_format_poly():
    assert format_poly(Poly.const(0)) == "0"
    assert format_poly(ALPHA * 2 - 1) in ("-1 + 2*alpha", "2*alpha - 1")


# --- partial derivative ------------------------------------------------------

def test_partial_of_constant():
    assert is_zero(partial_derivative(Scalar.const(2, 1), 1))


def test_partial_of_exponential():
    e = Scalar.mode((0, 1))
    assert partial_derivative(e, 1) == e * I


def test_partial_of_cos_is_minus_sin():
    assert partial_derivative(Scalar.cos(2, 1), 1) == -Scalar.sin(2, 1)


@given(S.scalars(2, bandwidth=2))
def test_partial_matches_finite_difference(s):
    h = 1e-5
    for p in points(2, 3):
        for axis in range(2):
            plus, minus = list(p), list(p)
            plus[axis] += h
            minus[axis] -= h
            fd = (sample(s, plus) - sample(s, minus)) / (2 * h)
            assert abs(sample(partial_derivative(s, axis), p) - fd) < 1e-5 * (1 + abs(fd))


# --- fiber mean --------------------------------------------------------------

def test_fiber_mean_examples():
    one = Scalar.const(2, 1)
    assert fiber_mean(one + Scalar.cos(2, 1), [1]) == one
    assert is_zero(fiber_mean(Scalar.mode((0, 1)), [1]))
    s = Scalar.cos(2, 0) * ALPHA
    assert fiber_mean(s, []) == s


@given(S.scalars(2, bandwidth=2))
def test_fiber_mean_matches_grid_average(s):
    m = fiber_mean(s, [1])
    n = 16  # exact for bandwidth < 16
    for x in (0.3, 1.9):
        avg = sum(sample(s, [x, 2 * math.pi * j / n]) for j in range(n)) / n
        assert abs(sample(m, [x, 0.0]) - avg) < 1e-9
        assert not m.depends_on(1)


# --- zero test and arithmetic ------------------------------------------------

def test_zero_test_examples():
    c, s = Scalar.cos(2, 1), Scalar.sin(2, 1)
    assert is_zero(c * c + s * s - 1)
    assert not is_zero(Scalar.mode((1, 0), ALPHA))
    assert is_zero(Scalar.mode((1, 0), ALPHA - ALPHA))


@given(S.scalars(2), S.scalars(2))
def test_product_matches_pointwise_product(a, b):
    for p in points(2, 4):
        assert abs(sample(a * b, p) - sample(a, p) * sample(b, p)) < 1e-9


@given(S.scalars(2, with_params=True), S.scalars(2, with_params=True), S.scalars(2, with_params=True))
def test_scalar_ring_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@given(S.scalars(2), S.scalars(2))
def test_leibniz(a, b):
    assert partial_derivative(a * b, 0) == partial_derivative(a, 0) * b + a * partial_derivative(b, 0)


def test_embed_restrict_roundtrip():
    s = Scalar.cos(2, 1) * ALPHA
    e = s.embed(3, (0, 2))
    assert e.depends_on(2) and not e.depends_on(1)
    assert e.restrict((0, 2)) == s


def test_format_scalar():
    assert format_scalar(Scalar.zero(2), NAMES) == "0"
    assert format_scalar(Scalar.mode((0, 1)), NAMES) == "exp(i*y)"
    assert format_scalar(Scalar.cos(2, 1), NAMES) == "1/2*exp(-i*y) + 1/2*exp(i*y)"
