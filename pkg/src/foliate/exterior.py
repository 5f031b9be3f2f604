"""Exterior calculus on ``T^n``: forms, vector fields, contraction, d, Lie derivative."""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral, Rational

from .coeffs import I, QI, Poly, ZERO, format_poly, join_signed
from .scalar import Scalar, default_names, format_scalar, poly_needs_parens


def _merge_sign(a, b):
    """Sign of sorting the concatenation ``a + b`` of two increasing tuples (0 if they meet)."""
    inv = 0
    for x in a:
        for y in b:
            if x == y:
                return 0, None
            if x > y:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(a + b))


class Form:
    """Sparse differential form: increasing index tuple -> :class:`Scalar` coefficient."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms=None):
        self.n = n
        clean = {}
        if terms:
            for mono, c in terms.items():
                mono = tuple(mono)
                if list(mono) != sorted(set(mono)):
                    raise ValueError(f"wedge monomial {mono} must be strictly increasing")
                if mono and not (0 <= mono[0] and mono[-1] < n):
                    raise ValueError(f"wedge monomial {mono} out of range for T^{n}")
                if not isinstance(c, Scalar):
                    c = Scalar.const(n, c)
                elif c.n != n:
                    raise ValueError("coefficient lives on a different torus")
                if not c.is_zero():
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _from_clean(cls, n, terms):
        obj = object.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, n: int) -> Form:
        return cls._from_clean(n, {})

    @classmethod
    def scalar(cls, s) -> Form:
        if not isinstance(s, Scalar):
            raise TypeError("Form.scalar expects a Scalar")
        return cls._from_clean(s.n, {(): s} if s else {})

    @classmethod
    def const(cls, n: int, value) -> Form:
        return cls.scalar(Scalar.const(n, value))

    @classmethod
    def d_coord(cls, n: int, axis: int) -> Form:
        return cls(n, {(axis,): Scalar.const(n, 1)})

    @property
    def terms(self):
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degrees(self):
        return sorted({len(m) for m in self._terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return degs[0] if degs else 0

    def part(self, k: int) -> Form:
        return Form._from_clean(self.n, {m: c for m, c in self._terms.items() if len(m) == k})

    def coefficient(self, mono) -> Scalar:
        return self._terms.get(tuple(mono), Scalar.zero(self.n))

    def scalar_part(self) -> Scalar:
        return self.coefficient(())

    def __eq__(self, other):
        if isinstance(other, Form):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (Scalar, Poly, QI, Integral, Rational)):
            return self == _as_form(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, tuple(sorted((m, hash(c)) for m, c in self._terms.items()))))
        return self._hash

    def _check(self, other):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: T^{self.n} vs T^{other.n}")

    def __neg__(self):
        return Form._from_clean(self.n, {m: -c for m, c in self._terms.items()})

    def __add__(self, other):
        if not isinstance(other, Form):
            try:
                other = _as_form(self.n, other)
            except TypeError:
                return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v.is_zero():
                    del out[m]
                else:
                    out[m] = v
        return Form._from_clean(self.n, out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Form):
            try:
                other = _as_form(self.n, other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_form(self.n, other) - self

    def __mul__(self, other):
        """Wedge product (or multiplication by a scalar)."""
        if isinstance(other, Form):
            return wedge(self, other)
        if isinstance(other, Scalar):
            if other.n != self.n:
                raise ValueError("dimension mismatch")
            return Form._from_clean(
                self.n, {m: v for m, c in self._terms.items() if (v := c * other)}
            )
        if isinstance(other, (Poly, QI, Integral, Rational)):
            return self * Scalar.const(self.n, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Scalar, Poly, QI, Integral, Rational)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        return Form._from_clean(self.n, {m: c / other for m, c in self._terms.items()})

    def __xor__(self, other):
        return wedge(self, other)

    def d(self) -> Form:
        return exterior_derivative(self)

    def map_coefficients(self, fn) -> Form:
        return Form(self.n, {m: fn(c) for m, c in self._terms.items()})

    def embed(self, n_total: int, positions) -> Form:
        out = {}
        for m, c in self._terms.items():
            out[tuple(positions[j] for j in m)] = c.embed(n_total, positions)
        # positions are increasing so monomials stay sorted
        return Form(n_total, out)

    def restrict(self, keep) -> Form:
        keep = tuple(keep)
        idx = {a: j for j, a in enumerate(keep)}
        out = {}
        for m, c in self._terms.items():
            if any(a not in idx for a in m):
                raise ValueError("form has a leg along a dropped axis")
            out[tuple(idx[a] for a in m)] = c.restrict(keep)
        return Form(len(keep), out)

    def substitute(self, values: dict) -> Form:
        return Form(self.n, {m: c.substitute(values) for m, c in self._terms.items()})

    def conjugate(self) -> Form:
        return Form._from_clean(self.n, {m: c.conjugate() for m, c in self._terms.items()})

    def bandwidth(self) -> int:
        return max((c.bandwidth() for c in self._terms.values()), default=0)

    def parameters(self) -> set[str]:
        out = set()
        for c in self._terms.values():
            out |= c.parameters()
        return out

    def sorted_terms(self):
        return sorted(self._terms.items())

    def format(self, names=None) -> str:
        return format_form(self, names or default_names(self.n))

    def __repr__(self):
        return f"Form({self.format()})"


def _as_form(n, value) -> Form:
    if isinstance(value, Form):
        return value
    if isinstance(value, Scalar):
        if value.n != n:
            raise ValueError("dimension mismatch")
        return Form.scalar(value)
    if isinstance(value, (Poly, QI, Integral, Rational)):
        return Form.const(n, value)
    raise TypeError(f"cannot interpret {type(value).__name__} as a form")


class VectorField:
    """Derivation ``sum_i comps[i] * d/dtheta_i`` with Scalar components."""

    __slots__ = ("n", "comps")

    def __init__(self, comps):
        comps = tuple(comps)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        n = len(comps)
        fixed = []
        for c in comps:
            if not isinstance(c, Scalar):
                c = Scalar.const(n, c)
            if c.n != n:
                raise ValueError("component count must equal the torus dimension")
            fixed.append(c)
        self.n = n
        self.comps = tuple(fixed)

    @classmethod
    def coord(cls, n: int, axis: int, coeff=1) -> VectorField:
        comps = [Scalar.zero(n)] * n
        comps[axis] = coeff if isinstance(coeff, Scalar) else Scalar.const(n, coeff)
        return cls(comps)

    @classmethod
    def zero(cls, n: int) -> VectorField:
        return cls([Scalar.zero(n)] * n)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return VectorField([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return VectorField([a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VectorField([-a for a in self.comps])

    def __mul__(self, s):
        if isinstance(s, Scalar) and s.n != self.n:
            raise ValueError("dimension mismatch")
        return VectorField([c * s for c in self.comps])

    __rmul__ = __mul__

    def __call__(self, f: Scalar) -> Scalar:
        """Directional derivative of a Scalar."""
        if f.n != self.n:
            raise ValueError("dimension mismatch")
        out = Scalar.zero(self.n)
        for axis, c in enumerate(self.comps):
            if c and f.depends_on(axis):
                out = out + c * f.partial(axis)
        return out

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.comps)

    def bandwidth(self) -> int:
        return max(c.bandwidth() for c in self.comps)

    def embed(self, n_total: int, positions) -> VectorField:
        comps = [Scalar.zero(n_total)] * n_total
        for j, p in enumerate(positions):
            comps[p] = self.comps[j].embed(n_total, positions)
        return VectorField(comps)

    def restrict(self, keep) -> VectorField:
        keep = tuple(keep)
        for a in range(self.n):
            if a not in keep and self.comps[a]:
                raise ValueError("vector field has a component along a dropped axis")
        return VectorField([self.comps[a].restrict(keep) for a in keep])

    def substitute(self, values: dict) -> VectorField:
        return VectorField([c.substitute(values) for c in self.comps])

    def format(self, names=None) -> str:
        return format_vector_field(self, names or default_names(self.n))

    def __repr__(self):
        return f"VectorField({self.format()})"


# ---------------------------------------------------------------- operations


def wedge(a: Form, b: Form) -> Form:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: T^{a.n} vs T^{b.n}")
    out: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            sign, m = _merge_sign(m1, m2)
            if not sign:
                continue
            c = c1 * c2
            if sign < 0:
                c = -c
            v = out.get(m)
            out[m] = c if v is None else v + c
    return Form(a.n, out)


def exterior_derivative(a: Form) -> Form:
    out: dict = {}
    n = a.n
    for mono, f in a.terms.items():
        for axis in range(n):
            if axis in mono or not f.depends_on(axis):
                continue
            below = sum(1 for j in mono if j < axis)
            m = tuple(sorted(mono + (axis,)))
            df = f.partial(axis)
            if below & 1:
                df = -df
            v = out.get(m)
            out[m] = df if v is None else v + df
    return Form(n, out)


def interior_product(V: VectorField, a: Form) -> Form:
    if V.n != a.n:
        raise ValueError(f"dimension mismatch: T^{V.n} vs T^{a.n}")
    out: dict = {}
    for mono, f in a.terms.items():
        for r, axis in enumerate(mono):
            comp = V.comps[axis]
            if comp.is_zero():
                continue
            m = mono[:r] + mono[r + 1:]
            c = comp * f
            if r & 1:
                c = -c
            v = out.get(m)
            out[m] = c if v is None else v + c
    return Form(a.n, out)


def lie_derivative(V: VectorField, a: Form) -> Form:
    return exterior_derivative(interior_product(V, a)) + interior_product(V, exterior_derivative(a))


def bracket(V: VectorField, W: VectorField) -> VectorField:
    if V.n != W.n:
        raise ValueError(f"dimension mismatch: T^{V.n} vs T^{W.n}")
    return VectorField([V(W.comps[j]) - W(V.comps[j]) for j in range(V.n)])


def evaluate_one_form(a: Form, V: VectorField) -> Scalar:
    """``a(V)`` for a 1-form; higher parts are ignored."""
    return interior_product(V, a.part(1)).scalar_part()


@dataclass(frozen=True)
class AffineMap:
    """``theta -> matrix @ theta + translation`` from ``T^n_source`` to ``T^n_target``.

    ``matrix`` has ``n_target`` rows; entries are ints or Polys.  Non-integer
    entries are allowed only where they meet constant coefficients.
    ``translation`` entries are exp-free Polys (formal or rational angles).
    """

    matrix: tuple
    translation: tuple

    def __post_init__(self):
        m = tuple(tuple(Poly.const(x) for x in row) for row in self.matrix)
        if not m or len({len(r) for r in m}) != 1:
            raise ValueError("matrix must be rectangular and nonempty")
        t = tuple(Poly.const(x) for x in self.translation) if self.translation else (ZERO,) * len(m)
        if len(t) != len(m):
            raise ValueError("translation length must equal the target dimension")
        if any(x.has_exp() for x in t):
            raise ValueError("translations must be exp-free")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls, n: int) -> AffineMap:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), (0,) * n)

    @classmethod
    def translation_by(cls, shift) -> AffineMap:
        n = len(shift)
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), tuple(shift))

    @property
    def n_target(self) -> int:
        return len(self.matrix)

    @property
    def n_source(self) -> int:
        return len(self.matrix[0])

    def compose(self, inner: AffineMap) -> AffineMap:
        """``self o inner``."""
        if inner.n_target != self.n_source:
            raise ValueError("dimension mismatch in composition")
        m = tuple(
            tuple(
                sum((self.matrix[i][k] * inner.matrix[k][j] for k in range(self.n_source)), ZERO)
                for j in range(inner.n_source)
            )
            for i in range(self.n_target)
        )
        t = tuple(
            sum((self.matrix[i][k] * inner.translation[k] for k in range(self.n_source)), ZERO)
            + self.translation[i]
            for i in range(self.n_target)
        )
        return AffineMap(m, t)

    def _int_entry(self, i, j):
        v = self.matrix[i][j].constant_value()
        if v is None or v.b != 0 or v.d != 1:
            return None
        return v.a


def _pull_scalar(phi: AffineMap, f: Scalar) -> Scalar:
    ns = phi.n_source
    out: dict = {}
    for k, c in f.terms.items():
        newk = [0] * ns
        for s in range(ns):
            total = 0
            for t in range(phi.n_target):
                if k[t] == 0:
                    continue
                e = phi._int_entry(t, s)
                if e is None:
                    raise ValueError("non-integer map entry meets a non-constant coefficient")
                total += k[t] * e
            newk[s] = total
        arg = sum((phi.translation[t] * k[t] for t in range(phi.n_target) if k[t]), ZERO)
        coeff = c * Poly.exp(arg * I) if arg else c
        key = tuple(newk)
        v = out.get(key)
        out[key] = coeff if v is None else v + coeff
    return Scalar(ns, out)


def pullback_affine(phi: AffineMap, a: Form) -> Form:
    """``phi^* a`` for an affine torus map ``phi``."""
    if a.n != phi.n_target:
        raise ValueError(f"form lives on T^{a.n}, map targets T^{phi.n_target}")
    ns = phi.n_source
    legs = [
        Form(ns, {(s,): Scalar.const(ns, phi.matrix[t][s]) for s in range(ns)})
        for t in range(phi.n_target)
    ]
    cache: dict = {(): Form.const(ns, 1)}
    out = Form.zero(ns)
    for mono, f in a.sorted_terms():
        if mono not in cache:
            w = Form.const(ns, 1)
            for t in mono:
                w = wedge(w, legs[t])
            cache[mono] = w
        out = out + cache[mono] * _pull_scalar(phi, f)
    return out


# ---------------------------------------------------------------- matrices


class Mat:
    """Square matrix whose entries are forms (or equivariant forms); ``@`` wedges."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square and nonempty")
        self.rows = rows

    @classmethod
    def diag(cls, entries, zero):
        entries = list(entries)
        return cls([[entries[i] if i == j else zero for j in range(len(entries))] for i in range(len(entries))])

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def map(self, fn) -> Mat:
        return Mat([[fn(x) for x in r] for r in self.rows])

    def __add__(self, other):
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return Mat([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def __mul__(self, s):
        return self.map(lambda x: x * s)

    def __matmul__(self, other):
        n = self.size
        return Mat(
            [
                [_sum([self.rows[i][k] * other.rows[k][j] for k in range(n)]) for j in range(n)]
                for i in range(n)
            ]
        )

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def is_diagonal(self) -> bool:
        return all(x.is_zero() for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def diagonal(self):
        return [self.rows[i][i] for i in range(self.size)]

    def trace(self):
        return _sum(self.diagonal())

    def __eq__(self, other):
        return isinstance(other, Mat) and all(
            (a - b).is_zero() for r, s in zip(self.rows, other.rows) for a, b in zip(r, s)
        )

    def __repr__(self):
        return f"Mat({self.rows!r})"


def _sum(items):
    out = items[0]
    for x in items[1:]:
        out = out + x
    return out


def commutator(a: Mat, b: Mat, sign: int = -1) -> Mat:
    """``a @ b + sign * b @ a``; pass ``sign=+1`` for two odd entries."""
    ab = a @ b
    ba = b @ a
    return ab - ba if sign < 0 else ab + ba


# ---------------------------------------------------------------- printing


def format_wedge(mono, names) -> str:
    return "^".join("d" + names[j] for j in mono)


def format_form(a: Form, names) -> str:
    if a.is_zero():
        return "0"
    pieces = []
    for mono, c in a.sorted_terms():
        if not mono:
            text = format_scalar(c, names)
            if len(c.terms) > 1 or poly_needs_parens(c.constant_part()):
                pieces.append((False, f"({text})"))
            else:
                neg = text.startswith("-")
                pieces.append((neg, text[1:] if neg else text))
            continue
        w = format_wedge(mono, names)
        pieces.append(_coeff_times(c, w, names))
    return join_signed(pieces)


def _coeff_times(c: Scalar, body: str, names):
    if len(c.terms) == 1:
        (k, p), = c.terms.items()
        if not any(k) and not poly_needs_parens(p):
            text = format_scalar(c, names)
            neg = text.startswith("-")
            if neg:
                text = text[1:]
            return neg, body if text == "1" else f"{text}*{body}"
        if any(k) and not poly_needs_parens(p):
            text = format_scalar(c, names)
            neg = text.startswith("-")
            if neg:
                text = text[1:]
            return neg, f"{text}*{body}"
        if not any(k):
            return False, f"({format_poly(p)})*{body}"
    return False, f"({format_scalar(c, names)})*{body}"


def format_vector_field(V: VectorField, names) -> str:
    pieces = []
    for axis, c in enumerate(V.comps):
        if c.is_zero():
            continue
        pieces.append(_coeff_times(c, f"d/d{names[axis]}", names))
    return join_signed(pieces) if pieces else "0"
