"""Exact coefficient ring: Gaussian rationals and polynomials in formal parameters.

A :class:`Poly` is a finite sum ``c * p1^e1 * ... * exp(q)`` where ``c`` is a
Gaussian rational, the ``p`` are named formal parameters and ``exp(q)`` is an
optional exponential atom whose argument ``q`` is itself an exp-free
:class:`Poly`.  Parameters are treated as algebraically independent
transcendentals and distinct exponential atoms as linearly independent, so a
Poly is zero exactly when its canonical term map is empty.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd
from numbers import Integral, Rational


class QI:
    """Gaussian rational ``(a + b*i) / d`` with ``d > 0`` and ``gcd(a, b, d) == 1``."""

    __slots__ = ("a", "b", "d")

    def __init__(self, re=0, im=0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a, b, d):
        g = gcd(a, b, d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        self.a, self.b, self.d = a, b, d

    @classmethod
    def _raw(cls, a, b, d):
        obj = object.__new__(cls)
        if d < 0:
            a, b, d = -a, -b, -d
        obj._set(a, b, d)
        return obj

    @classmethod
    def coerce(cls, x) -> QI:
        if isinstance(x, QI):
            return x
        if isinstance(x, (Integral, Rational)):
            return cls(x)
        if isinstance(x, complex):
            raise TypeError("floating-point complex values are not exact")
        raise TypeError(f"cannot coerce {type(x).__name__} to a Gaussian rational")

    @property
    def real(self) -> Fraction:
        return Fraction(self.a, self.d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self.b, self.d)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, QI):
            return self.a == other.a and self.b == other.b and self.d == other.d
        if isinstance(other, (Integral, Rational)):
            return self.b == 0 and Fraction(self.a, self.d) == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.d))
        return hash((self.a, self.b, self.d))

    def key(self):
        return (self.a, self.b, self.d)

    def __neg__(self):
        return QI._raw(-self.a, -self.b, self.d)

    def __add__(self, other):
        if not isinstance(other, QI):
            try:
                other = QI.coerce(other)
            except TypeError:
                return NotImplemented
        d = self.d * other.d
        return QI._raw(self.a * other.d + other.a * self.d, self.b * other.d + other.b * self.d, d)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, QI):
            try:
                other = QI.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return QI.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, QI):
            try:
                other = QI.coerce(other)
            except TypeError:
                return NotImplemented
        return QI._raw(
            self.a * other.a - self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.d * other.d,
        )

    __rmul__ = __mul__

    def inverse(self) -> QI:
        n = self.a * self.a + self.b * self.b
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        # d / (a + b i) = d (a - b i) / (a^2 + b^2)
        return QI._raw(self.d * self.a, -self.d * self.b, n)

    def __truediv__(self, other):
        if not isinstance(other, QI):
            try:
                other = QI.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QI.coerce(other) * self.inverse()

    def conjugate(self) -> QI:
        return QI._raw(self.a, -self.b, self.d)

    def __complex__(self):
        return complex(self.a / self.d, self.b / self.d)

    def __repr__(self):
        return f"QI({self})"

    def __str__(self):
        return format_qi(self)


I = QI(0, 1)
ONE = QI(1)
ZERO_QI = QI(0)


def _frac(n: int, d: int) -> str:
    return str(n) if d == 1 else f"{n}/{d}"


def format_qi(q: QI) -> str:
    """``p/q``, ``r/s*i`` or ``p/q+r/s*i``."""
    if q.b == 0:
        f = Fraction(q.a, q.d)
        return _frac(f.numerator, f.denominator)
    im = Fraction(q.b, q.d)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = _frac(im.numerator, im.denominator) + "*i"
    if q.a == 0:
        return ims
    re = Fraction(q.a, q.d)
    sep = "" if ims.startswith("-") else "+"
    return _frac(re.numerator, re.denominator) + sep + ims


def _mul_params(p, q):
    if not p:
        return q
    if not q:
        return p
    out = dict(p)
    for name, e in q:
        out[name] = out.get(name, 0) + e
    return tuple(sorted(out.items()))


def _mono_key(m):
    params, arg = m
    return (params, arg.key if arg is not None else ())


class Poly:
    """Immutable sparse polynomial over the Gaussian rationals.

    Terms map a monomial ``(params, exparg)`` to a nonzero :class:`QI`; ``params``
    is a sorted tuple of ``(name, exponent)`` and ``exparg`` is ``None`` or a
    nonzero exp-free Poly.
    """

    __slots__ = ("_terms", "_key", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if not isinstance(c, QI):
                    c = QI.coerce(c)
                if not c.is_zero():
                    clean[m] = c
        self._terms = clean
        self._key = None
        self._hash = None

    @classmethod
    def _from_clean(cls, terms):
        obj = object.__new__(cls)
        obj._terms = terms
        obj._key = None
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, value) -> Poly:
        if isinstance(value, Poly):
            return value
        q = QI.coerce(value)
        return cls._from_clean({((), None): q} if q else {})

    @classmethod
    def param(cls, name: str, power: int = 1) -> Poly:
        return cls._from_clean({(((name, power),), None): ONE})

    @classmethod
    def exp(cls, arg: Poly) -> Poly:
        """The exponential atom ``exp(arg)``; ``arg`` must be exp-free."""
        arg = Poly.const(arg)
        if arg.has_exp():
            raise ValueError("nested exponential atoms are not supported")
        if arg.is_zero():
            return cls.const(1)
        # split off the constant rational part only when it is zero: atoms stay symbolic
        return cls._from_clean({((), arg): ONE})

    # structure -------------------------------------------------------
    @property
    def terms(self):
        return self._terms

    @property
    def key(self):
        if self._key is None:
            self._key = tuple(
                sorted(((_mono_key(m), c.key()) for m, c in self._terms.items()))
            )
        return self._key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Poly):
            if len(self._terms) != len(other._terms):
                return False
            return self._terms == other._terms
        try:
            return self == Poly.const(other)
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self.key < other.key

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def has_exp(self) -> bool:
        return any(m[1] is not None for m in self._terms)

    def parameters(self) -> set[str]:
        names = set()
        for (params, arg) in self._terms:
            names.update(n for n, _ in params)
            if arg is not None:
                names |= arg.parameters()
        return names

    def constant_value(self) -> QI | None:
        """The Gaussian rational this Poly equals, or ``None`` if it is symbolic."""
        if not self._terms:
            return ZERO_QI
        if len(self._terms) == 1:
            (m, c), = self._terms.items()
            if m == ((), None):
                return c
        return None

    def is_unit(self) -> bool:
        """A single term without parameters (possibly an exp atom) is invertible."""
        if len(self._terms) != 1:
            return False
        (params, _), = self._terms
        return not params

    def unit_inverse(self) -> Poly:
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit")
        ((params, arg), c), = self._terms.items()
        inv_arg = None if arg is None else -arg
        return Poly._from_clean({((), inv_arg): c.inverse()})

    # arithmetic ------------------------------------------------------
    def __neg__(self):
        return Poly._from_clean({m: -c for m, c in self._terms.items()})

    def __add__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except TypeError:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
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
        return Poly._from_clean(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def scale(self, q) -> Poly:
        q = QI.coerce(q)
        if q.is_zero():
            return ZERO
        return Poly._from_clean({m: c * q for m, c in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (QI, Integral, Rational)):
                return self.scale(other)
            return NotImplemented
        if not self._terms or not other._terms:
            return ZERO
        out = {}
        for (p1, a1), c1 in self._terms.items():
            for (p2, a2), c2 in other._terms.items():
                if a1 is None:
                    arg = a2
                elif a2 is None:
                    arg = a1
                else:
                    arg = a1 + a2
                    if arg.is_zero():
                        arg = None
                m = (_mul_params(p1, p2), arg)
                c = c1 * c2
                v = out.get(m)
                if v is None:
                    out[m] = c
                else:
                    v = v + c
                    if v.is_zero():
                        del out[m]
                    else:
                        out[m] = v
        return Poly._from_clean(out)

    def __rmul__(self, other):
        if isinstance(other, (QI, Integral, Rational)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.unit_inverse() ** (-n)
        out = ONE_POLY
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        other = Poly.const(other)
        if other.is_unit():
            return self * other.unit_inverse()
        return self.exact_div(other)

    def conjugate(self) -> Poly:
        """Complex conjugation treating parameters as real."""
        out = {}
        for (params, arg), c in self._terms.items():
            out[(params, None if arg is None else arg.conjugate())] = c.conjugate()
        return Poly(out)

    def exact_div(self, divisor: Poly) -> Poly:
        """Quotient when ``divisor`` divides ``self`` exactly; raises ``ArithmeticError`` otherwise."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero")
        if divisor.is_unit():
            return self * divisor.unit_inverse()
        if divisor.has_exp():
            raise ArithmeticError("exact division by a non-monomial with exponential atoms")
        # exp atoms are linearly independent: divide each atom class separately
        groups: dict = {}
        for (params, arg), c in self._terms.items():
            groups.setdefault(arg, {})[(params, None)] = c
        out = ZERO
        for arg, sub in sorted(groups.items(), key=lambda kv: kv[0].key if kv[0] is not None else ()):
            q = _divide_exp_free(Poly._from_clean(sub), divisor)
            out = out + (q if arg is None else q * Poly._from_clean({((), arg): ONE}))
        return out

    # evaluation ------------------------------------------------------
    def substitute(self, values: dict) -> Poly:
        """Replace parameters by Polys (exact)."""
        out = ZERO
        for (params, arg), c in self._terms.items():
            t = Poly._from_clean({((), None): c})
            for name, e in params:
                if name in values:
                    t = t * Poly.const(values[name]) ** e
                else:
                    t = t * Poly.param(name, e)
            if arg is not None:
                t = t * Poly.exp(arg.substitute(values))
            out = out + t
        return out

    def evaluate(self, values: dict) -> complex:
        """Floating-point value for diagnostics only."""
        total = 0j
        for (params, arg), c in self._terms.items():
            v = complex(c)
            for name, e in params:
                v *= complex(values[name]) ** e
            if arg is not None:
                v *= cmath.exp(arg.evaluate(values))
            total += v
        return total

    # printing --------------------------------------------------------
    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda mc: _mono_key(mc[0]))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({self})"


ZERO = Poly()
ONE_POLY = Poly.const(1)


def _leading(p: Poly):
    # lex order on sorted (name, exp) tuples, compared by descending exponent vector
    def order(m):
        params = m[0]
        return tuple((n, -e) for n, e in params)

    mons = sorted(p.terms, key=order)
    return mons[0] if mons else None


def _mono_divides(d, m):
    dm = dict(m)
    for n, e in d:
        if dm.get(n, 0) < e:
            return None
        dm[n] -= e
    return tuple(sorted((n, e) for n, e in dm.items() if e))


def _divide_exp_free(f: Poly, g: Poly) -> Poly:
    # multivariate division by a single divisor; remainder zero iff g | f
    names = sorted(f.parameters() | g.parameters())

    def vec(params):
        dm = dict(params)
        return tuple(dm.get(n, 0) for n in names)

    def lead(p):
        return max(p.terms, key=lambda m: vec(m[0]))

    lg = lead(g)
    cg = g.terms[lg]
    q = ZERO
    r = f
    while not r.is_zero():
        lr = lead(r)
        rest = _mono_divides(lg[0], lr[0])
        if rest is None:
            raise ArithmeticError(f"{g} does not divide {f}")
        t = Poly._from_clean({(rest, None): r.terms[lr] / cg})
        q = q + t
        r = r - t * g
    return q


def _format_params(params) -> str:
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in params)


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for (params, arg), c in p.sorted_terms():
        factors = []
        if params:
            factors.append(_format_params(params))
        if arg is not None:
            factors.append(f"exp({format_poly(arg)})")
        pieces.append(_signed_term(c, "*".join(factors)))
    return join_signed(pieces)


def _signed_term(c: QI, body: str):
    """Return ``(negative, text)`` for coefficient ``c`` times ``body``."""
    if not body:
        s = format_qi(c)
        if s.startswith("-") and (c.a == 0 or c.b == 0):
            return True, s[1:]
        return False, s
    if c.b == 0 or c.a == 0:
        neg = (c.a < 0) if c.b == 0 else (c.b < 0)
        mag = -c if neg else c
        if mag == 1:
            return neg, body
        return neg, f"{format_qi(mag)}*{body}"
    return False, f"({format_qi(c)})*{body}"


def join_signed(pieces) -> str:
    out = []
    for k, (neg, text) in enumerate(pieces):
        if k == 0:
            out.append(("-" if neg else "") + text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out)
