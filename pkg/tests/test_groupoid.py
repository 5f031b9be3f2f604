from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import strategies as S
from foliate import (
    Bundle, Connection, Form, HaarData, KroneckerGroupoid, Poly, Scalar, check_connection,
    closure_description, haar_average_connection, pullback_affine, return_map_orbit,
)
from foliate.groupoid import Angle, is_rotation_invariant, rotation

P = Bundle(1, 1)
G = KroneckerGroupoid("alpha")


def d(i):
    return Form.d_coord(2, i)


def conn(h):
    return Connection(P, (d(1) + d(0) * h,))


def test_orbit_examples():
    assert [a.format() for a in return_map_orbit(G, 0, 0).angles] == ["0"]
    orb = return_map_orbit(G, 0, 2)
    assert [a.format() for a in orb.angles] == ["0", "2*alpha*pi", "4*alpha*pi"]
    assert orb.distinct and orb.period is None
    half = return_map_orbit(KroneckerGroupoid(Fraction(1, 2)), 0, 3)
    assert [a.format() for a in half.angles] == ["0", "pi", "0", "pi"]
    assert half.period == 2 and not half.distinct


@given(st.integers(1, 12), st.integers(-5, 5), st.integers(0, 20))
def test_rational_orbit_period_is_denominator(q, p, steps):
    g = KroneckerGroupoid(Fraction(p, q))
    orb = return_map_orbit(g, 0, steps)
    # rotation by 2 pi p/q returns after the reduced denominator many steps
    period = Fraction(p, q).denominator
    assert orb.period == (period if steps >= period else None)


@given(st.integers(-4, 4), st.integers(-4, 4))
def test_groupoid_composition_is_additive(a, b):
    assert G.compose(G.arrow(a), G.arrow(b)) == G.arrow(a + b)
    assert G.compose(G.arrow(a), G.inverse(G.arrow(a))).is_zero()


def test_angles_reduce_mod_full_turn():
    assert Angle(Fraction(5, 2)) == Angle(Fraction(1, 2))
    assert Angle(2).is_zero()


def test_closure_examples():
    assert closure_description(G).describe() == "pair groupoid, closure rank 2"
    assert closure_description(KroneckerGroupoid(Fraction(1, 2))).describe() == "Z/2 rotations, closure rank 1"
    assert closure_description(KroneckerGroupoid(0)).describe().startswith("trivial groupoid")


def test_haar_normalization():
    assert HaarData().total_mass() == 1


def test_average_examples():
    out = haar_average_connection(conn(Scalar.const(2, 1) + Scalar.cos(2, 0)), G)
    assert out.connection.omega == (d(1) + d(0),)
    assert out.invariant and out.idempotent and out.is_connection
    assert haar_average_connection(conn(Scalar.mode((1, 0))), G).connection.omega == (d(1),)
    inv = conn(Scalar.const(2, Fraction(3, 2)))
    assert haar_average_connection(inv, G).connection == inv


@given(S.scalars(2, bandwidth=2))
def test_average_is_mean_of_coefficient(h):
    # only theta-dependence is averaged; z-dependence is not allowed in a connection anyway
    h = Scalar(2, {k: c for k, c in h.terms.items() if k[1] == 0})
    out = haar_average_connection(conn(h), G)
    mean = h.fiber_mean([0])
    assert out.connection.omega == (d(1) + d(0) * mean,)
    assert check_connection(out.connection) and out.invariant and out.idempotent


def test_rotation_invariance_uses_symbolic_angle():
    assert not is_rotation_invariant(conn(Scalar.cos(2, 0)))
    w = conn(Scalar.const(2, 2))
    phi = rotation(2, Poly.param("s"))
    assert pullback_affine(phi, w.omega[0]) == w.omega[0]


def test_average_preconditions():
    with pytest.raises(ValueError):
        haar_average_connection(conn(Scalar.const(2, 1)), KroneckerGroupoid(Fraction(1, 2)))
    with pytest.raises(ValueError):
        haar_average_connection(Connection(Bundle(2, 1), (Form.d_coord(3, 2),)), G)
