import math
import random

from hypothesis import given, settings

import strategies as S
from foliate import (
    AffineMap, Form, I, Mat, Poly, Scalar, VectorField, bracket, exterior_derivative,
    interior_product, lie_derivative, pullback_affine, wedge,
)
from foliate.exterior import format_form

ALPHA = Poly.param("alpha")
NAMES = ("x", "y", "z")


def dx(n, i):
    return Form.d_coord(n, i)


def cos(n, i):
    return Scalar.cos(n, i)


def sin(n, i):
    return Scalar.sin(n, i)


def coord(n, i, c=1):
    return VectorField.coord(n, i, c)


def rand_points(n, count=4, seed=1):
    rng = random.Random(seed)
    return [[rng.uniform(0, 2 * math.pi) for _ in range(n)] for _ in range(count)]


def shifted(p, axis, h):
    q = list(p)
    q[axis] += h
    return q


def fd(s, p, axis, h=1e-5):
    return (s.evaluate(shifted(p, axis, h)) - s.evaluate(shifted(p, axis, -h))) / (2 * h)


# --- worked examples ---------------------------------------------------------

def test_wedge_examples():
    x, y = dx(2, 0), dx(2, 1)
    assert wedge(x, y) == Form(2, {(0, 1): Scalar.const(2, 1)})
    assert wedge(x, x).is_zero()
    lhs = wedge(x * cos(2, 1), y * Scalar.mode((1, 0)))
    assert lhs == wedge(x, y) * (cos(2, 1) * Scalar.mode((1, 0)))


def test_d_examples():
    assert exterior_derivative(Form.const(2, 5)).is_zero()
    assert exterior_derivative(Form.scalar(cos(2, 1))) == dx(2, 1) * -sin(2, 1)
    w = dx(2, 0) * cos(2, 1)
    assert exterior_derivative(w) == wedge(dx(2, 0), dx(2, 1)) * sin(2, 1)


def test_d_of_one_form_matches_grid_finite_differences():
    w = dx(2, 0) * cos(2, 1) + dx(2, 1) * (Scalar.mode((1, 1)) * 2)
    dw = exterior_derivative(w).coefficient((0, 1))
    for p in rand_points(2):
        oracle = fd(w.coefficient((1,)), p, 0) - fd(w.coefficient((0,)), p, 1)
        assert abs(dw.evaluate(p) - oracle) < 1e-6


def test_interior_examples():
    xy = wedge(dx(3, 0), dx(3, 1))
    assert interior_product(coord(3, 0), xy) == dx(3, 1)
    assert interior_product(coord(3, 2), xy).is_zero()
    V = coord(2, 0) + coord(2, 1, ALPHA)
    assert interior_product(V, dx(2, 1) - dx(2, 0) * ALPHA).is_zero()


def test_lie_examples():
    e = Scalar.mode((1, 0))
    assert lie_derivative(coord(2, 0), dx(2, 1) * e) == dx(2, 1) * (e * I)
    assert lie_derivative(coord(2, 0), dx(2, 1)).is_zero()
    assert lie_derivative(coord(2, 1), dx(2, 0) * cos(2, 1)) == dx(2, 0) * -sin(2, 1)


def test_bracket_examples():
    assert bracket(coord(2, 0), coord(2, 1)).is_zero()
    V = coord(3, 0) + VectorField([Scalar.zero(3), Scalar.zero(3), cos(3, 1)])
    assert bracket(V, coord(3, 1)) == VectorField([Scalar.zero(3), Scalar.zero(3), sin(3, 1)])
    assert bracket(V, V).is_zero()


@given(S.vector_fields(2, bandwidth=1), S.vector_fields(2, bandwidth=1))
@settings(max_examples=25)
def test_bracket_matches_grid_commutator_on_coordinates(V, W):
    B = bracket(V, W)
    for p in rand_points(2, 2):
        for k in range(2):
            # [V,W] x_k = V(W_k) - W(V_k), by directional finite differences
            vw = sum(V.comps[a].evaluate(p) * fd(W.comps[k], p, a) for a in range(2))
            wv = sum(W.comps[a].evaluate(p) * fd(V.comps[k], p, a) for a in range(2))
            assert abs(B.comps[k].evaluate(p) - (vw - wv)) < 1e-5 * (1 + abs(vw) + abs(wv))


def test_pullback_examples():
    c = Poly.param("c")
    rot = AffineMap.translation_by([c, 0])
    assert pullback_affine(rot, dx(2, 1)) == dx(2, 1)
    shift_y = AffineMap.translation_by([0, c])
    e = Scalar.mode((0, 1))
    assert pullback_affine(shift_y, dx(2, 1) * e) == dx(2, 1) * (e * Poly.exp(c * I))
    shear = AffineMap(((1, 1), (0, 1)), (0, 0))
    assert pullback_affine(shear, dx(2, 0)) == dx(2, 0) + dx(2, 1)


def test_pullback_matches_grid_sampling():
    phi = AffineMap(((1, 1), (0, 2)), (Poly.const(0), Poly.const(0)))
    f = Scalar.mode((1, 0)) + Scalar.mode((0, -1)) * 3
    g = pullback_affine(phi, Form.scalar(f)).scalar_part()
    for x, y in rand_points(2):
        assert abs(g.evaluate([x, y]) - f.evaluate([x + y, 2 * y])) < 1e-9


def test_format_form():
    w = dx(3, 0) * cos(3, 1) + wedge(dx(3, 1), dx(3, 2)) * Scalar.const(3, Poly.const(2))
    assert format_form(w, NAMES) == "(1/2*exp(-i*y) + 1/2*exp(i*y))*dx + 2*dy^dz"
    assert format_form(Form.zero(3), NAMES) == "0"


# --- identities --------------------------------------------------------------

@given(S.forms(3))
@settings(max_examples=150)
def test_d_squared_is_zero(a):
    assert exterior_derivative(exterior_derivative(a)).is_zero()


@given(S.vector_fields(3), S.forms(3))
@settings(max_examples=150)
def test_cartan_magic_formula(V, a):
    d, i = exterior_derivative, interior_product
    assert lie_derivative(V, a) == d(i(V, a)) + i(V, d(a))
    assert d(lie_derivative(V, a)) == lie_derivative(V, d(a))


@given(S.vector_fields(3), S.vector_fields(3), S.forms(3))
@settings(max_examples=150)
def test_interior_of_bracket(V, W, a):
    i, L = interior_product, lie_derivative
    assert i(bracket(V, W), a) == L(V, i(W, a)) - i(W, L(V, a))


@given(S.affine_maps(2, 3), S.affine_maps(3, 3), S.forms(3))
@settings(max_examples=150)
def test_pullback_functoriality(phi, psi, a):
    # (psi o phi)^* = phi^* psi^*, and pullback commutes with d
    lhs = pullback_affine(psi.compose(phi), a)
    assert lhs == pullback_affine(phi, pullback_affine(psi, a))
    assert pullback_affine(phi, exterior_derivative(a)) == exterior_derivative(pullback_affine(phi, a))


@given(S.affine_maps(3, 3), S.forms(3, max_terms=2), S.forms(3, max_terms=2))
def test_pullback_is_multiplicative(phi, a, b):
    assert pullback_affine(phi, wedge(a, b)) == wedge(pullback_affine(phi, a), pullback_affine(phi, b))


@given(S.forms(3, degree=1), S.forms(3, degree=2), S.forms(3))
def test_graded_commutativity_and_leibniz(a, b, c):
    assert wedge(a, b) == wedge(b, a)
    assert wedge(a, a).is_zero()
    d = exterior_derivative
    assert d(wedge(a, c)) == wedge(d(a), c) - wedge(a, d(c))


@given(S.forms(3, degree=1), S.forms(3, degree=1))
def test_mat_wedge_product_is_entrywise_for_diagonals(a, b):
    z = Form.zero(3)
    A = Mat.diag([a, b], z)
    P = A @ A
    assert P.is_diagonal() and P.is_zero()
