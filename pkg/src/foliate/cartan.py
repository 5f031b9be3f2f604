"""Cartan model: polynomials in Lie-dual variables with form coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from numbers import Integral, Rational

from .bundle import Connection, _as_mat, curvature
from .coeffs import QI, Poly
from .exterior import (
    Form,
    Mat,
    VectorField,
    bracket,
    exterior_derivative,
    interior_product,
    lie_derivative,
)
from .scalar import Scalar, default_names, format_scalar


class EquivForm:
    """``sum_e x^e * alpha_e`` with ``e`` an exponent tuple over ``dual_vars``."""

    __slots__ = ("n", "dual_vars", "_terms")

    def __init__(self, n: int, dual_vars, terms=None):
        self.n = n
        self.dual_vars = tuple(dual_vars)
        d = len(self.dual_vars)
        clean = {}
        for e, a in (terms or {}).items():
            e = tuple(e)
            if len(e) != d or any(x < 0 for x in e):
                raise ValueError(f"bad exponent {e} for dual variables {self.dual_vars}")
            if not isinstance(a, Form):
                a = Form.scalar(a) if isinstance(a, Scalar) else Form.const(n, a)
            if a.n != n:
                raise ValueError("coefficient lives on a different torus")
            if a:
                clean[e] = clean[e] + a if e in clean else a
        self._terms = {e: a for e, a in clean.items() if a}

    @classmethod
    def from_form(cls, a: Form, dual_vars) -> EquivForm:
        return cls(a.n, dual_vars, {(0,) * len(tuple(dual_vars)): a})

    @classmethod
    def var(cls, n: int, dual_vars, j: int) -> EquivForm:
        e = [0] * len(tuple(dual_vars))
        e[j] = 1
        return cls(n, dual_vars, {tuple(e): Form.const(n, 1)})

    @classmethod
    def zero(cls, n: int, dual_vars) -> EquivForm:
        return cls(n, dual_vars)

    @property
    def terms(self):
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def gradings(self):
        """Sorted set of ``2 * poly degree + form degree`` over all terms."""
        out = set()
        for e, a in self._terms.items():
            for k in a.degrees():
                out.add(2 * sum(e) + k)
        return sorted(out)

    def poly_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def _lift(self, other) -> EquivForm:
        if isinstance(other, EquivForm):
            if other.dual_vars != self.dual_vars or other.n != self.n:
                raise ValueError("EquivForms over different dual variables or tori")
            return other
        if isinstance(other, Form):
            return EquivForm.from_form(other, self.dual_vars)
        if isinstance(other, (Scalar, Poly, QI, Integral, Rational)):
            return EquivForm.from_form(Form.scalar(other) if isinstance(other, Scalar) else Form.const(self.n, other), self.dual_vars)
        raise TypeError(f"cannot combine EquivForm with {type(other).__name__}")

    def __eq__(self, other):
        try:
            other = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash((self.dual_vars, tuple(sorted((e, hash(a)) for e, a in self._terms.items()))))

    def __neg__(self):
        return EquivForm(self.n, self.dual_vars, {e: -a for e, a in self._terms.items()})

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for e, a in other._terms.items():
            out[e] = out[e] + a if e in out else a
        return EquivForm(self.n, self.dual_vars, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (Scalar, Poly, QI, Integral, Rational)):
            return self.map_forms(lambda a: a * other)
        other = self._lift(other)
        out: dict = {}
        for e1, a1 in self._terms.items():
            for e2, a2 in other._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                p = a1 * a2
                out[e] = out[e] + p if e in out else p
        return EquivForm(self.n, self.dual_vars, out)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, Poly, QI, Integral, Rational)):
            return self * other
        return self._lift(other) * self

    def map_forms(self, fn) -> EquivForm:
        return EquivForm(self.n, self.dual_vars, {e: fn(a) for e, a in self._terms.items()})

    def coefficient(self, e) -> Form:
        return self._terms.get(tuple(e), Form.zero(self.n))

    def truncate(self, max_poly_degree: int) -> EquivForm:
        return EquivForm(
            self.n, self.dual_vars, {e: a for e, a in self._terms.items() if sum(e) <= max_poly_degree}
        )

    def evaluate(self, point) -> Form:
        """Substitute values (numbers or Polys) for the dual variables."""
        point = [Poly.const(v) for v in point]
        if len(point) != len(self.dual_vars):
            raise ValueError("need one value per dual variable")
        out = Form.zero(self.n)
        for e, a in self._terms.items():
            c = Poly.const(1)
            for v, k in zip(point, e):
                c = c * v**k
            out = out + a * c
        return out

    def substitute(self, values) -> EquivForm:
        return self.map_forms(lambda a: a.substitute(values))

    def sorted_terms(self):
        return sorted(self._terms.items())

    def format(self, names=None) -> str:
        return format_equiv(self, names or default_names(self.n))

    def __repr__(self):
        return f"EquivForm({self.format()})"


def format_monomial(e, dual_vars) -> str:
    parts = []
    for name, k in zip(dual_vars, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_equiv(a: EquivForm, names) -> str:
    if a.is_zero():
        return "0"
    pieces = []
    for e, f in a.sorted_terms():
        mono = format_monomial(e, a.dual_vars)
        if mono and f.degrees() == [0]:
            text = format_scalar(f.scalar_part(), names)
        else:
            text = f.format(names)
        if not mono:
            pieces.append(text if not pieces or " " not in text else f"({text})")
            continue
        if text == "1":
            pieces.append(mono)
        elif text == "-1":
            pieces.append(f"-{mono}")
        elif " " in text or text.startswith("-"):
            pieces.append(f"{mono}*({text})")
        else:
            pieces.append(f"{mono}*{text}")
    out = pieces[0]
    for p in pieces[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def _as_equiv(a, dual_vars) -> EquivForm:
    if isinstance(a, EquivForm):
        return a
    if isinstance(a, Form):
        return EquivForm.from_form(a, dual_vars)
    raise TypeError(f"expected a Form or EquivForm, got {type(a).__name__}")


# ---------------------------------------------------------------- differential


def equivariant_d(a: EquivForm, actions) -> EquivForm:
    """``d a - sum_j x^j i(Y_j) a``."""
    actions = tuple(actions)
    if len(actions) != len(a.dual_vars):
        raise ValueError(f"{len(a.dual_vars)} dual variables but {len(actions)} action fields")
    out = a.map_forms(exterior_derivative)
    for j, Y in enumerate(actions):
        out = out - EquivForm.var(a.n, a.dual_vars, j) * a.map_forms(lambda f: interior_product(Y, f))
    return out


def equivariant_lie(a: EquivForm, Y: VectorField) -> EquivForm:
    return a.map_forms(lambda f: lie_derivative(Y, f))


def is_invariant(a: EquivForm, actions) -> bool:
    return all(not equivariant_lie(a, Y) for Y in actions)


def _equiv_d_mat(M: Mat, actions) -> Mat:
    return M.map(lambda x: equivariant_d(x, actions))


# ---------------------------------------------------------------- bundle data


@dataclass(frozen=True)
class EquivariantBundleData:
    """A connection (Connection, Mat or Form) with commuting invariance fields."""

    connection: object
    actions: tuple
    dual_vars: tuple = ()

    def __post_init__(self):
        actions = tuple(self.actions)
        object.__setattr__(self, "actions", actions)
        dual = tuple(self.dual_vars) or tuple(f"x{j + 1}" for j in range(len(actions)))
        if len(dual) != len(actions):
            raise ValueError("need one dual variable per action field")
        object.__setattr__(self, "dual_vars", dual)
        A = _as_mat(self.connection)
        for Y in actions:
            if any(lie_derivative(Y, w) for row in A.rows for w in row):
                raise ValueError("connection is not invariant under the action fields")
        for i, Y in enumerate(actions):
            for Yk in actions[i + 1:]:
                if not bracket(Y, Yk).is_zero():
                    raise ValueError("action fields do not commute")
        if isinstance(self.connection, Connection):
            b = self.connection.bundle
            for Y in actions:
                for l in range(b.fiber_angles):
                    if not bracket(Y, b.fundamental_field(l)).is_zero():
                        raise ValueError("action fields must commute with fiber translations")

    @property
    def matrix(self) -> Mat:
        return _as_mat(self.connection)

    @property
    def n(self) -> int:
        return self.matrix[0, 0].n


def moment(data: EquivariantBundleData) -> dict:
    """``mu(Y_j) = -omega(Y_j)`` as a Mat of Scalars, keyed by dual variable."""
    A = data.matrix
    return {
        x: A.map(lambda w, Y=Y: -interior_product(Y, w).scalar_part())
        for x, Y in zip(data.dual_vars, data.actions)
    }


def equivariant_curvature(data: EquivariantBundleData) -> Mat:
    """``Omega - sum_j x^j omega(Y_j)`` as a Mat of EquivForms."""
    n, dual = data.n, data.dual_vars
    R = curvature(data.matrix)
    mu = moment(data)
    out = R.map(lambda f: EquivForm.from_form(f, dual))
    for j, x in enumerate(dual):
        xj = EquivForm.var(n, dual, j)
        out = out + mu[x].map(lambda s, xj=xj: xj * s)
    return out


def equivariant_bianchi(data: EquivariantBundleData) -> bool:
    """``d_g(R + mu) + [omega, R + mu] = 0`` exactly."""
    F = equivariant_curvature(data)
    W = data.matrix.map(lambda w: EquivForm.from_form(w, data.dual_vars))
    lhs = _equiv_d_mat(F, data.actions) + (W @ F) - (F @ W)
    return lhs.is_zero()


# ---------------------------------------------------------------- Chern characters


def _exp_series(R, one, top: int):
    """``sum_{m <= top} (-R)^m / m!`` for an even, commuting ``R``."""
    out = one
    power = one
    for m in range(1, top + 1):
        power = power * R
        if not power:
            break
        out = out + power * (QI((-1) ** m) / factorial(m))
    return out


def _diagonal_curvature(c) -> Mat:
    A = _as_mat(c)
    R = curvature(A)
    if not (A.is_diagonal() and R.is_diagonal()):
        raise ValueError("Chern characters are only available for commuting (diagonal) curvature")
    return R


def chern_character(c) -> Form:
    """``Tr exp(-R)``; closedness is asserted."""
    R = _diagonal_curvature(c)
    n = R[0, 0].n
    ch = Form.zero(n)
    for r in R.diagonal():
        ch = ch + _exp_series(r, Form.const(n, 1), n // 2)
    if exterior_derivative(ch):
        raise RuntimeError("internal error: Chern form is not closed")
    return ch


@dataclass
class EquivariantChern:
    value: object  # Form at an evaluation point, EquivForm in formal mode
    closed: bool
    point: tuple | None = None
    order: int | None = None


def equivariant_chern_character(data: EquivariantBundleData, eval_at=None, order=None) -> EquivariantChern:
    """``Tr exp(-(R + mu))`` at a point of the dual space or as a truncated series.

    At a point the moment must be constant; its exponential is kept as an
    exact exp-atom.  In formal mode the exponential series is cut after
    ``order`` terms, so every retained term has equivariant degree <= 2*order.
    """
    R = _diagonal_curvature(data.matrix)
    n, dual = data.n, data.dual_vars
    F = equivariant_curvature(data)
    if not F.is_diagonal():
        raise ValueError("moment is not diagonal")
    if eval_at is not None:
        point = tuple(Poly.const(v) for v in eval_at)
        if len(point) != len(dual):
            raise ValueError("need one value per dual variable")
        mu = moment(data)
        total = Form.zero(n)
        for a, r in enumerate(R.diagonal()):
            m = Scalar.zero(n)
            for x, v in zip(dual, point):
                m = m + mu[x][a, a] * v
            if not m.is_constant():
                raise ValueError("moment is not constant; its exponential is not representable")
            weight = Poly.exp(-m.constant_part())
            total = total + _exp_series(r, Form.const(n, 1), n // 2) * weight
        fields = data.actions
        dX = exterior_derivative(total)
        for v, Y in zip(point, fields):
            dX = dX - interior_product(Y, total) * v
        closed = dX.is_zero()
        if not closed:
            raise RuntimeError("internal error: equivariant Chern form is not closed")
        return EquivariantChern(total, closed, point=point)
    if order is None:
        raise ValueError("formal mode needs a truncation order")
    one = EquivForm.from_form(Form.const(n, 1), dual)
    total = EquivForm.zero(n, dual)
    for f in F.diagonal():
        total = total + _exp_series(f, one, order)
    closed = equivariant_d(total, data.actions).is_zero()
    if not closed:
        raise RuntimeError("internal error: equivariant Chern form is not closed")
    return EquivariantChern(total, closed, order=order)


# ---------------------------------------------------------------- Chern-Weil


def _check_frame(frame):
    for k, (theta, _) in enumerate(frame):
        for l, (_, X) in enumerate(frame):
            if interior_product(X, theta) != Form.const(theta.n, 1 if k == l else 0):
                raise ValueError(f"frame duality fails at ({k + 1}, {l + 1})")


def _project_form(a: Form, frame) -> Form:
    for theta, X in frame:
        a = a - theta * interior_product(X, a)
    return a


def horizontal_projection(a, frame):
    """``prod_j (Id - theta^j ^ i(X_j))`` on a Form or coefficientwise on an EquivForm."""
    frame = [(t, X) for t, X in frame]
    _check_frame(frame)
    if isinstance(a, EquivForm):
        return a.map_forms(lambda f: _project_form(f, frame))
    return _project_form(a, frame)


def chern_weil(a, frame, curvature_components=None, k_actions=()):
    """``[a(Theta)]^hor``; with ``k_actions`` the equivariant map ``[a(Theta(Y), Y)]^hor``.

    The first ``len(frame)`` dual variables of ``a`` are substituted; the
    remaining ones must match ``k_actions`` and survive in the output.
    """
    frame = [(t, X) for t, X in frame]
    _check_frame(frame)
    k_actions = tuple(k_actions)
    g = len(frame)
    n = frame[0][0].n if frame else a.n
    if isinstance(a, Form):
        a = EquivForm.from_form(a, tuple(f"x{j + 1}" for j in range(g)))
    if len(a.dual_vars) != g + len(k_actions):
        raise ValueError("dual variables do not match the frame and k-actions")
    thetas = curvature_components
    if thetas is None:
        thetas = [exterior_derivative(t) for t, _ in frame]
    if len(thetas) != g:
        raise ValueError("need one curvature component per frame element")
    kvars = a.dual_vars[g:]
    subst = []
    for (theta, _), Th in zip(frame, thetas):
        s = EquivForm.from_form(Th, kvars)
        for l, Y in enumerate(k_actions):
            s = s - EquivForm.var(n, kvars, l) * interior_product(Y, theta)
        subst.append(s)
    out = EquivForm.zero(n, kvars)
    for e, f in a.sorted_terms():
        term = EquivForm.from_form(f, kvars)
        for s, k in zip(subst, e[:g]):
            for _ in range(k):
                term = s * term
        kpart = e[g:]
        if any(kpart):
            term = term * EquivForm(n, kvars, {kpart: Form.const(n, 1)})
        out = out + term
    out = out.map_forms(lambda f: _project_form(f, frame))
    if not k_actions:
        return out.coefficient(())
    return out
